"""python -m polyparse"""

import sys

from .cli import main

sys.exit(main())
