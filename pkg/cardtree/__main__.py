import sys

from cardtree.cli import main

sys.exit(main())
