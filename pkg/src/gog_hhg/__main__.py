"""Allow ``python -m gog_hhg``."""

from __future__ import annotations

import sys

from gog_hhg.cli import main


if __name__ == "__main__":
    sys.exit(main())
