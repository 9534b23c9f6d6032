"""
Toolkit entry point.

Usage: ``python -m lpnkit <command> [flags]``.
"""

import sys

from lpnkit.api.cli import main

sys.exit(main())
