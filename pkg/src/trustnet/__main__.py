import sys

from trustnet.cli import main

sys.exit(main())
