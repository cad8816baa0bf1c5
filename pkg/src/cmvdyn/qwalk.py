"""Coined quantum walks on the line and their CMV gauge.

The tensor basis is flattened as |n> (x) up -> 2n and |n> (x) down -> 2n+1.
The walk operator is stored in the CGMV matrix convention (the transpose of
the naive update-rule matrix): in flat coordinates its nonzero entries are

    U[2n, 2n-1] = c21_n    U[2n, 2n+2] = c11_n
    U[2n+1, 2n-1] = c22_n  U[2n+1, 2n+2] = c12_n

Under this convention a diagonal phase gauge Lambda conjugates U into an
extended CMV matrix whose odd Verblunsky coefficients vanish.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .banded import BandedUnitary
from .cmv import VerblunskySequence, build_extended_cmv
from .errors import (
    GaugeDegenerateError,
    MissingCoefficientError,
    WindowAlignmentError,
)


@dataclass(frozen=True)
class Coin:
    """A 2x2 unitary coin."""

    c11: complex
    c12: complex
    c21: complex
    c22: complex

    def __post_init__(self):
        M = self.matrix()
        dev = np.max(np.abs(M.conj().T @ M - np.eye(2)))
        if dev > 1e-12:
            raise ValueError(f"coin is not unitary (deviation {dev:.3g})")

    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.c11, self.c12], [self.c21, self.c22]], dtype=complex
        )

    @classmethod
    def rotation(cls, theta: float) -> "Coin":
        c, s = math.cos(theta), math.sin(theta)
        return cls(c, -s, s, c)

    @classmethod
    def identity(cls) -> "Coin":
        return cls(1.0, 0.0, 0.0, 1.0)


@dataclass
class CoinSequence:
    """Indexed family of coins; ``generator`` fills missing sites on demand."""

    coins: dict = field(default_factory=dict)
    generator: Optional[Callable[[int], Coin]] = field(default=None, repr=False)

    def coin(self, n: int) -> Coin:
        if n not in self.coins:
            if self.generator is None:
                raise MissingCoefficientError(f"coin at site {n} not available")
            self.coins[n] = self.generator(n)
        return self.coins[n]

    @classmethod
    def constant(cls, coin: Coin) -> "CoinSequence":
        return cls({}, generator=lambda n: coin)

    @classmethod
    def rotation(cls, theta: float) -> "CoinSequence":
        return cls.constant(Coin.rotation(theta))

    @classmethod
    def random(cls, seed: int) -> "CoinSequence":
        """Haar-ish random coins, deterministic per (seed, site).

        Coins with a nearly vanishing diagonal are redrawn so the CMV gauge
        stays well defined.
        """

        def make(n):
            rng = np.random.default_rng([seed, n + 2**32])
            while True:
                z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
                q, r = np.linalg.qr(z)
                q = q @ np.diag(np.diag(r) / np.abs(np.diag(r)))
                if min(abs(q[0, 0]), abs(q[1, 1])) > 1e-3:
                    return Coin(q[0, 0], q[0, 1], q[1, 0], q[1, 1])

        return cls({}, generator=make)

    @classmethod
    def from_file(cls, path) -> "CoinSequence":
        """Read plain text: ``n re(c11) im(c11) re(c12) im(c12) re(c21) im(c21) re(c22) im(c22)``."""
        coins = {}
        for line in Path(path).read_text().splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 9:
                raise ValueError(f"malformed coin line: {line!r}")
            n = int(parts[0])
            v = [float(x) for x in parts[1:]]
            coins[n] = Coin(
                complex(v[0], v[1]),
                complex(v[2], v[3]),
                complex(v[4], v[5]),
                complex(v[6], v[7]),
            )
        return cls(coins)

    def to_file(self, path):
        def fmt(c):
            return " ".join(
                f"{float(v.real)!r} {float(v.imag)!r}"
                for v in (c.c11, c.c12, c.c21, c.c22)
            )

        lines = [f"{n} {fmt(c)}" for n, c in sorted(self.coins.items())]
        Path(path).write_text("\n".join(lines) + "\n")


def build_walk_operator(coins: CoinSequence, window) -> BandedUnitary:
    """Walk operator window on flat indices [lo, hi) in the CMV convention."""
    lo, hi = window
    if hi - lo < 4:
        raise WindowAlignmentError("window length must be >= 4")
    d = np.zeros((5, hi - lo), dtype=complex)
    for j in range(lo, hi):
        col = j - lo
        if j % 2 == 0:
            c = coins.coin(j // 2 - 1)
            d[0, col] = c.c11  # row j - 2
            d[1, col] = c.c12  # row j - 1
        else:
            c = coins.coin((j + 1) // 2)
            d[3, col] = c.c21  # row j + 1
            d[4, col] = c.c22  # row j + 2
    return BandedUnitary(
        lo,
        d,
        half_line=False,
        rebuild=lambda nlo, nhi: build_walk_operator(coins, (nlo, nhi)),
    )


class GaugePhases:
    """Diagonal phases lambda_n conjugating a walk operator to CMV form.

    Defined by lambda_0 = lambda_{-1} = 1 and the two-step recursions
    lambda_{2n+2} = exp(-i s1_n) lambda_{2n},
    lambda_{2n+1} = exp(+i s2_n) lambda_{2n-1},
    where s1_n, s2_n are the phases of the diagonal coin entries c11_n,
    c22_n.  Negative indices follow by inverting the recursions.  Values
    are computed lazily and cached.
    """

    def __init__(self, coins: CoinSequence):
        self.coins = coins
        self._cache = {0: 1.0 + 0.0j, -1: 1.0 + 0.0j}

    @staticmethod
    def _diag_phase(coin: Coin, which: int) -> float:
        entry = coin.c11 if which == 1 else coin.c22
        if abs(entry) < 1e-14:
            raise GaugeDegenerateError(
                "coin diagonal entry vanishes; gauge phase undefined"
            )
        return cmath.phase(entry)

    def lam(self, m: int) -> complex:
        if m in self._cache:
            return self._cache[m]
        if m % 2 == 0:
            if m > 0:
                # lambda_{2n+2} = e^{-i s1_n} lambda_{2n} with 2n = m - 2
                s1 = self._diag_phase(self.coins.coin(m // 2 - 1), 1)
                v = cmath.exp(-1j * s1) * self.lam(m - 2)
            else:
                # backward: lambda_{2n} = e^{+i s1_n} lambda_{2n+2}
                s1 = self._diag_phase(self.coins.coin(m // 2), 1)
                v = cmath.exp(1j * s1) * self.lam(m + 2)
        else:
            if m > 0:
                # lambda_{2n+1} = e^{+i s2_n} lambda_{2n-1} with 2n+1 = m
                s2 = self._diag_phase(self.coins.coin((m - 1) // 2), 2)
                v = cmath.exp(1j * s2) * self.lam(m - 2)
            else:
                # backward: lambda_{2n-1} = e^{-i s2_n} lambda_{2n+1}
                s2 = self._diag_phase(self.coins.coin((m + 1) // 2), 2)
                v = cmath.exp(-1j * s2) * self.lam(m + 2)
        self._cache[m] = v
        return v

    def diagonal(self, lo: int, hi: int) -> np.ndarray:
        return np.array([self.lam(m) for m in range(lo, hi)], dtype=complex)


def cgmv_gauge(coins: CoinSequence) -> tuple[GaugePhases, VerblunskySequence]:
    """Gauge phases and Verblunsky coefficients of the conjugated walk.

    alpha_{2n+1} = 0 and alpha_{2n} = (lambda_{2n}/lambda_{2n-1}) conj(c21_n).
    Coins with a vanishing diagonal entry (equivalently a unimodular
    off-diagonal entry) are rejected: the phase extraction is undefined.
    """
    phases = GaugePhases(coins)

    def alpha(k):
        if k % 2 != 0:
            return 0.0 + 0.0j
        n = k // 2
        c = coins.coin(n)
        if abs(c.c21) >= 1.0 - 1e-14:
            raise GaugeDegenerateError(
                f"|c21| = {abs(c.c21):.6g} at site {n}; walk decouples and "
                "the gauge correspondence degenerates"
            )
        return (phases.lam(k) / phases.lam(k - 1)) * np.conj(c.c21)

    return phases, VerblunskySequence({}, half_line=False, generator=alpha)


def gauged_cmv(coins: CoinSequence, window) -> BandedUnitary:
    """Extended CMV matrix gauge-equivalent to the walk operator."""
    _, alphas = cgmv_gauge(coins)
    return build_extended_cmv(alphas, window)


def verify_gauge_equivalence(
    U: BandedUnitary, phases: GaugePhases, E: BandedUnitary
) -> float:
    """Max entrywise deviation |Lambda* U Lambda - E| over the common interior."""
    lo = max(U.lo, E.lo)
    hi = min(U.hi, E.hi)
    if hi - lo < 4:
        raise WindowAlignmentError("windows share too little interior")
    lam = phases.diagonal(lo - 2, hi + 2)

    def lam_at(m):
        return lam[m - (lo - 2)]

    worst = 0.0
    for j in range(lo + 2, hi - 2):
        for o in (-2, -1, 0, 1, 2):
            i = j + o
            conj = np.conj(lam_at(i)) * U.entry(i, j) * lam_at(j)
            worst = max(worst, abs(conj - E.entry(i, j)))
    return worst
