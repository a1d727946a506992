import sys

from sbpquad.cli import main

sys.exit(main())
