"""Banded unitary operators on an integer lattice window.

An operator is stored by its five diagonals (offsets -2..+2) in
column-aligned form: ``diagonals[o + 2][j]`` is the matrix entry at row
``lo + j + o``, column ``lo + j``.  Windows are half-open intervals
``[lo, hi)`` of lattice indices.  Finitely supported vectors are stored as
a contiguous value block together with its first lattice index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import TruncationError

OFFSETS = (-2, -1, 0, 1, 2)


@dataclass(frozen=True)
class State:
    """Finitely supported vector: ``values[i]`` sits at lattice site ``lo + i``."""

    lo: int
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))

    @classmethod
    def delta(cls, n: int) -> "State":
        return cls(n, np.array([1.0 + 0.0j]))

    @classmethod
    def from_items(cls, items) -> "State":
        """Build from an iterable of (site, amplitude) pairs."""
        items = dict(items)
        if not items:
            return cls(0, np.zeros(0, dtype=complex))
        lo, hi = min(items), max(items) + 1
        v = np.zeros(hi - lo, dtype=complex)
        for n, a in items.items():
            v[n - lo] = a
        return cls(lo, v)

    @property
    def hi(self) -> int:
        return self.lo + len(self.values)

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def amplitude(self, n: int) -> complex:
        if self.lo <= n < self.hi:
            return complex(self.values[n - self.lo])
        return 0.0 + 0.0j

    def trimmed(self) -> "State":
        """Drop exactly-zero entries at both ends of the value block."""
        nz = np.nonzero(self.values)[0]
        if len(nz) == 0:
            return State(self.lo, np.zeros(0, dtype=complex))
        a, b = nz[0], nz[-1] + 1
        if a == 0 and b == len(self.values):
            return self
        return State(self.lo + int(a), self.values[a:b])

    def probabilities(self) -> tuple[int, np.ndarray]:
        return self.lo, np.abs(self.values) ** 2

    def normalized(self) -> "State":
        return State(self.lo, self.values / np.linalg.norm(self.values))


@dataclass(frozen=True)
class BandedUnitary:
    """Window of a banded unitary operator (bandwidth 2 on each side).

    ``rebuild``, when present, regenerates the operator on a larger window
    from its defining data; it makes exact auto-growing evolution possible.
    """

    lo: int
    diagonals: np.ndarray  # shape (5, hi - lo), row o+2 holds offset o
    half_line: bool = False
    rebuild: Optional[Callable[[int, int], "BandedUnitary"]] = field(
        default=None, repr=False, compare=False
    )

    @property
    def hi(self) -> int:
        return self.lo + self.diagonals.shape[1]

    @property
    def window(self) -> tuple[int, int]:
        return self.lo, self.hi

    @property
    def size(self) -> int:
        return self.diagonals.shape[1]

    def entry(self, i: int, j: int) -> complex:
        o = i - j
        if o not in (-2, -1, 0, 1, 2):
            return 0.0 + 0.0j
        if not (self.lo <= j < self.hi):
            return 0.0 + 0.0j
        return complex(self.diagonals[o + 2, j - self.lo])

    def dense(self) -> np.ndarray:
        """Materialize the window as a dense matrix (rows and columns in-window)."""
        n = self.size
        out = np.zeros((n, n), dtype=complex)
        for o in OFFSETS:
            d = self.diagonals[o + 2]
            for jr in range(n):
                ir = jr + o
                if 0 <= ir < n:
                    out[ir, jr] = d[jr]
        return out

    def covers(self, lo: int, hi: int) -> bool:
        return self.lo <= lo and hi <= self.hi

    def grown(self, lo: int, hi: int) -> "BandedUnitary":
        """Return an operator whose window covers [lo, hi), rebuilding if needed."""
        if self.half_line:
            lo = max(lo, 0)
        if self.covers(lo, hi):
            return self
        if self.rebuild is None:
            raise TruncationError(
                f"window [{self.lo}, {self.hi}) cannot cover [{lo}, {hi}) "
                "and no rebuild rule is attached"
            )
        lo = min(lo, self.lo)
        hi = max(hi, self.hi)
        return self.rebuild(lo, hi)


def apply(U: BandedUnitary, v: State, auto_extend: bool = True) -> State:
    """Apply a banded unitary to a finitely supported vector.

    The support must stay at distance >= 2 from the open window edges
    (the lattice edge at 0 of a half-line operator is a true boundary and
    is exempt).  With ``auto_extend`` the operator window is regrown via
    its rebuild rule; otherwise a violation raises ``TruncationError``.
    """
    v = v.trimmed()
    if len(v.values) == 0:
        return v
    lo_need = v.lo - 2
    hi_need = v.hi + 2
    if U.half_line:
        lo_need = max(lo_need, 0)
        if v.lo < 0:
            raise TruncationError("negative support on a half-line operator")
    ok = U.lo <= lo_need and hi_need <= U.hi
    if not ok:
        if not auto_extend:
            raise TruncationError(
                f"support [{v.lo}, {v.hi}) touches window [{U.lo}, {U.hi})"
            )
        U = U.grown(lo_need - 16, hi_need + 16)
    out_lo = lo_need
    out = np.zeros(hi_need - out_lo, dtype=complex)
    j0 = v.lo - U.lo
    n = len(v.values)
    for o in OFFSETS:
        d = U.diagonals[o + 2, j0 : j0 + n]
        start = v.lo + o - out_lo
        clip = max(-start, 0)  # rows below the half-line edge carry no mass
        seg = (d * v.values)[clip:]
        if len(seg):
            out[start + clip : start + clip + len(seg)] += seg
    return State(out_lo, out).trimmed()


def interior_gram_deviation(U: BandedUnitary, margin: int = 2) -> float:
    """Max deviation from orthonormality among interior columns of the window.

    Dense oracle: forms the window matrix and its Gram matrix directly.
    """
    dense = U.dense()
    n = U.size
    if n <= 2 * margin:
        return 0.0
    cols = dense[:, margin : n - margin]
    gram = cols.conj().T @ cols
    return float(np.max(np.abs(gram - np.eye(gram.shape[0]))))
