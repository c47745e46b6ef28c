import sys

from privcomb.cli import main

sys.exit(main())
