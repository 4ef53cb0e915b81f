import sys

from hemln.cli import main

sys.exit(main())
