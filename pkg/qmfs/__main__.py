import sys

from qmfs.main import main

sys.exit(main())
