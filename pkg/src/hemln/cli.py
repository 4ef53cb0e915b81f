"""Command-line front end.

Exit codes: 0 success, 1 I/O or input-data error, 2 spec validation error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from hemln import bench, ingest
from hemln.community import CommunityAssignment, detect_all
from hemln.coupling import WeightMetric, cbg_rows
from hemln.dsl import KCommunitySpec, SpecSyntaxError, parse_spec, validate_spec
from hemln.kcommunity import KCommunityResult, SpecError, detect_k_community
from hemln.network import HeMLN, Layer

log = logging.getLogger("hemln")

EXIT_OK, EXIT_IO, EXIT_INVALID = 0, 1, 2


class ValidationFailed(Exception):
    def __init__(self, violations: list[str]):
        super().__init__("\n".join(violations))
        self.violations = violations


def _csv(rows: list[list], header: Sequence[str], comments: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _prepare(manifest: str, spec_text: str, metric: str | None) -> tuple[HeMLN, KCommunitySpec]:
    """Parse and validate the k-community spec before any heavy computation."""
    try:
        spec = parse_spec(spec_text)
    except SpecSyntaxError as exc:
        raise ValidationFailed([str(exc)]) from None
    if metric:
        spec = dataclasses.replace(spec, metric=WeightMetric.from_token(metric))
    h, _ = ingest.load_hemln(manifest)
    problems = validate_spec(spec, h)
    if problems:
        raise ValidationFailed(problems)
    return h, spec


def run_spec(
    manifest: str, spec_text: str, metric: str | None = None, threads: int = 1
) -> tuple[HeMLN, KCommunityResult, dict[str, CommunityAssignment]]:
    h, spec = _prepare(manifest, spec_text, metric)
    assignments = detect_all((h.layers[name] for name in spec.layers), threads=threads)
    try:
        result = detect_k_community(h, spec, assignments)
    except SpecError as exc:
        raise ValidationFailed(exc.violations) from None
    return h, result, assignments


# -- subcommands ------------------------------------------------------------


STATS_HEADER = ("layer", "nodes", "edges", "communities", "avg_size")


def cmd_stats(manifest: str, threads: int = 1) -> list[dict]:
    """Per-layer node, edge and community counts plus average community size."""
    h, _ = ingest.load_hemln(manifest)
    names = sorted(h.layers)
    assignments = detect_all((h.layers[n] for n in names), threads=threads)
    rows = []
    for name in names:
        sizes = [s.size for s in assignments[name].communities.values()]
        rows.append(
            {
                "layer": name,
                "nodes": len(h.layers[name].nodes),
                "edges": len(h.layers[name].edges),
                "communities": len(sizes),
                "avg_size": round(sum(sizes) / len(sizes), 4) if sizes else 0,
            }
        )
    return rows


def _write_cbgs(result: KCommunityResult, out: Path) -> None:
    for i, cbg in enumerate(result.cbgs):
        path = out / f"cbg_{i}_{cbg.left_layer}_{cbg.right_layer}.tsv"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("left_id\tright_id\texpanded\tweight_num\tweight_den\n")
            for row in cbg_rows(cbg):
                fh.write("\t".join(map(str, row)) + "\n")


def cmd_detect(
    manifest: str,
    spec_text: str,
    out: str,
    metric: str | None = None,
    threads: int = 1,
    dump_cbg: bool = False,
    fmt: str = "json",
) -> KCommunityResult:
    h, result, assignments = run_spec(manifest, spec_text, metric, threads)
    out_dir = Path(out)
    ingest.export_result(result, h, assignments, out_dir, fmt)
    if dump_cbg:
        _write_cbgs(result, out_dir)
    return result


BENCH_HEADER = ("phase", "name", "seconds", "communities", "meta_edges", "links")


def cmd_bench(
    manifest: str | None = None,
    spec_text: str | None = None,
    params: bench.BenchParams = bench.BenchParams(),
) -> tuple[list[bench.BenchRow], list[str]]:
    """Time per-layer detection and per-step composition.

    Without a manifest a synthetic planted-partition network is generated.
    """
    if manifest is None:
        comments = [f"synthetic {params.header()}"]
        h = bench.synthetic_hemln(params)
        spec_text = spec_text or bench.synthetic_spec_text(params.layers)
        try:
            spec = parse_spec(spec_text)
        except SpecSyntaxError as exc:
            raise ValidationFailed([str(exc)]) from None
        problems = validate_spec(spec, h)
        if problems:
            raise ValidationFailed(problems)
    else:
        if spec_text is None:
            raise ValidationFailed(["--spec is required with --manifest"])
        comments = [f"manifest {manifest}"]
        h, spec = _prepare(manifest, spec_text, None)
    comments.append(f"spec {spec}")
    rows, result, _ = bench.run_bench(h, spec)
    comments.append(f"result {result.summary()}")
    return rows, comments


def _layer_from_input(args) -> Layer:
    path = Path(args.input)
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if line:
                records.append((lineno, line.split()))
    try:
        if args.kind == "pearson":
            features = {int(r[0]): [float(x) for x in r[1:]] for _, r in records}
            return ingest.pearson_layer(features, args.threshold, args.name)
        if args.kind == "cooccur":
            incidence = [(int(r[0]), r[1]) for _, r in records]
            return ingest.cooccurrence_layer(incidence, args.min_count, args.name)
        values = {int(r[0]): float(r[1]) for _, r in records}
        breakpoints = [float(b) for b in args.breakpoints.split(",")]
        return ingest.range_layer(values, breakpoints, args.name)
    except (IndexError, ValueError) as exc:
        raise ingest.IngestError(f"{path}: {exc}") from None


# -- argument parsing -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hemln", description="Community analysis of heterogeneous multilayer networks"
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="per-layer statistics")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", help="directory for stats.csv and stats.png")
    p.add_argument("--threads", type=int, default=1)

    for name, help_text in (("detect", "compute a k-community"), ("export", "export a k-community")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--manifest", required=True)
        p.add_argument("--spec", required=True, help='e.g. "A @(A,B) B @(B,C) C ; we"')
        p.add_argument("--out", required=True)
        p.add_argument("--metric", choices=[m.value for m in WeightMetric])
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--dump-cbg", action="store_true")
        if name == "export":
            p.add_argument("--format", choices=["json", "edge-lists"], default="edge-lists")

    p = sub.add_parser("bench", help="time detection against composition")
    p.add_argument("--manifest")
    p.add_argument("--spec")
    p.add_argument("--out", help="directory for bench.csv and bench.png")
    p.add_argument("--seed", type=int, default=bench.BenchParams.seed)
    p.add_argument("--nodes", type=int, default=bench.BenchParams.nodes)
    p.add_argument("--community-size", type=int, default=bench.BenchParams.community_size)
    p.add_argument("--links", type=int, default=bench.BenchParams.links)

    p = sub.add_parser("build-layer", help="build a layer from raw feature data")
    p.add_argument("kind", choices=["pearson", "cooccur", "range"])
    p.add_argument("--input", required=True)
    p.add_argument("--name", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--threshold", type=float, default=0.9)
    p.add_argument("--min-count", type=int, default=3)
    p.add_argument("--breakpoints", default=",".join(str(i) for i in range(11)))
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return _dispatch(args)
    except ValidationFailed as exc:
        for v in exc.violations:
            print(f"error: {v}", file=sys.stderr)
        return EXIT_INVALID
    except (OSError, ingest.IngestError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def _dispatch(args) -> int:
    if args.command == "stats":
        rows = cmd_stats(args.manifest, args.threads)
        text = _csv([[r[k] for k in STATS_HEADER] for r in rows], STATS_HEADER)
        sys.stdout.write(text)
        if args.out:
            from hemln.plotting import plot_stats

            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            (out / "stats.csv").write_text(text, encoding="utf-8")
            plot_stats(rows, out / "stats.png")
        return EXIT_OK

    if args.command in ("detect", "export"):
        fmt = getattr(args, "format", "json")
        result = cmd_detect(
            args.manifest, args.spec, args.out, args.metric, args.threads, args.dump_cbg, fmt
        )
        print(result.summary())
        return EXIT_OK

    if args.command == "bench":
        params = bench.BenchParams(
            nodes=args.nodes, community_size=args.community_size, links=args.links, seed=args.seed
        )
        rows, comments = cmd_bench(args.manifest, args.spec, params)
        table = [[getattr(r, k) for k in BENCH_HEADER] for r in rows]
        for row in table:
            row[2] = f"{row[2]:.6f}"
        text = _csv(table, BENCH_HEADER, comments)
        sys.stdout.write(text)
        if args.out:
            from hemln.plotting import plot_bench

            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            (out / "bench.csv").write_text(text, encoding="utf-8")
            plot_bench(rows, out / "bench.png")
        return EXIT_OK

    if args.command == "build-layer":
        layer = _layer_from_input(args)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        nodes_name, edges_name = ingest.write_layer(layer, out)
        print(f"{layer.name}: {len(layer.nodes)} nodes, {len(layer.edges)} edges -> "
              f"{out / nodes_name}, {out / edges_name}")
        return EXIT_OK
    raise AssertionError(args.command)


if __name__ == "__main__":
    sys.exit(main())
