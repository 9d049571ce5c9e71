import sys

from trajaug.cli import main

sys.exit(main())
