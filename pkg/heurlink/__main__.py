import sys

from heurlink.main import main

sys.exit(main())
