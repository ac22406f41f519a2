"""
FETI-DP Substructuring Laboratory
"""

__version__ = "0.1.0"
