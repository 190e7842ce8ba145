import sys

from conjperm.cli import main

sys.exit(main())
