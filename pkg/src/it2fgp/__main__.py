import sys

from .hostio import main

sys.exit(main())
