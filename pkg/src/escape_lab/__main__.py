import sys

from escape_lab.cli import main

sys.exit(main())
