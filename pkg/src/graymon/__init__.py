"""String-diagram movies for pseudomonoid computads in Gray monoids, with decision procedures for their 1-cells and 2-cells."""
from __future__ import annotations

__version__ = "0.1.0"
