"""Allow ``python -m pti`` as an alternative to the ``pti`` console script."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
