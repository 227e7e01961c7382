import sys

from tvglasso.main import main

sys.exit(main())
