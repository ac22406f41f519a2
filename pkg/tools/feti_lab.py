#!/usr/bin/env python3
"""
FETI-DP Substructuring Laboratory

Command-line entry point for the experiments.

Usage:
    python tools/feti_lab.py counterexample --N-list 3,4,8
    python tools/feti_lab.py spectrum --operator F --N 4 --m 4
    python tools/feti_lab.py scaling --operator F --fix subdomains --values 4,8,16 --N 4
    python tools/feti_lab.py poincare --m-list 2,4,8,16
"""

import sys
from pathlib import Path

# Add the src directory to the path
sys.path.append(str(Path(__file__).parent.parent / "src"))
from main import run

if __name__ == "__main__":
    sys.exit(run())
