#!/usr/bin/env python3
"""Dunkl-Williams Laboratory - Main Entry Point."""

import sys
import os

# Add src to path for imports
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from src.cli.runner import main


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
