#!/usr/bin/env python3
"""Command-line entrypoint: python entrypoint.py <subcommand> [options]."""

import sys

from app.interface.cli import main

if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
