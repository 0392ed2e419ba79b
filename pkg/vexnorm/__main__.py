import sys

from vexnorm.cli import main


sys.exit(main())
