import sys

from rclab.cli import main

sys.exit(main())
