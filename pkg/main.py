"""
main.py: Entry point for freefall
"""

import logging
import sys

from freefall.cli import main

if __name__ in {"__main__"}:
    logging.basicConfig(level=logging.WARNING, stream=sys.stderr, format="%(levelname)s %(message)s")
    sys.exit(main())
