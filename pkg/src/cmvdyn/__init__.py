"""Discrete-time dynamics of banded unitary operators.

CMV matrices and coined quantum walks on the line, exact finitely
supported evolution, transport exponents, spectral-measure diagnostics,
subordinacy machinery, and the Fibonacci quantum-walk lower bounds.
"""

from .banded import BandedUnitary, State, apply
from .cmv import (
    VerblunskySequence,
    build_extended_cmv,
    build_half_line_cmv,
    paraorthogonal_spectrum,
)
from .measure import ArcPartition, DiscreteMeasure
from .qwalk import Coin, CoinSequence, build_walk_operator, cgmv_gauge

__all__ = [
    "ArcPartition",
    "BandedUnitary",
    "Coin",
    "CoinSequence",
    "DiscreteMeasure",
    "State",
    "VerblunskySequence",
    "apply",
    "build_extended_cmv",
    "build_half_line_cmv",
    "build_walk_operator",
    "cgmv_gauge",
    "paraorthogonal_spectrum",
]

__version__ = "0.1.0"
