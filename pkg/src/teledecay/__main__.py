import sys

from teledecay.cli import main

sys.exit(main())
