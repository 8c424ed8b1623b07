"""Allow ``python -m bailrule``."""

import sys

from .cli import main

sys.exit(main())
