#!/usr/bin/env python3
"""
Main entry point for the marginal-pgm command line.
"""
import sys
from pathlib import Path

# Add the project root to the Python path
sys.path.append(str(Path(__file__).parent))

from marginal_pgm.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
