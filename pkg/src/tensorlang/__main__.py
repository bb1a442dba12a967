import sys

from tensorlang.cli import main

sys.exit(main())
