import sys

from vpsteady.cli import main

sys.exit(main())
