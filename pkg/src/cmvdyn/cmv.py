"""CMV matrices (half-line and extended) built from Verblunsky coefficients.

Entries follow the standard pentadiagonal pattern; the half-line matrix is
realized as the extended one with the boundary convention alpha_{-1} = -1,
which reproduces the half-line corner exactly (rho_{-1} = 0 removes every
reference to coefficients below the boundary).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .banded import BandedUnitary, State, apply
from .errors import (
    CoefficientDomainError,
    MissingCoefficientError,
    NumericalError,
    WindowAlignmentError,
)
from .measure import DiscreteMeasure


@dataclass
class VerblunskySequence:
    """Indexed family of Verblunsky coefficients alpha_n in the open unit disk.

    ``coefficients`` maps integer indices to complex values; ``generator``,
    when given, fills (and caches) missing indices on demand, which lets
    evolution auto-grow operator windows without pre-tabulating thousands
    of coefficients.
    """

    coefficients: dict = field(default_factory=dict)
    half_line: bool = True
    generator: Optional[Callable[[int], complex]] = field(default=None, repr=False)

    def __post_init__(self):
        for n, a in self.coefficients.items():
            self._validate(n, a)

    @staticmethod
    def _validate(n, a):
        if abs(a) >= 1.0:
            raise CoefficientDomainError(
                f"|alpha_{n}| = {abs(a):.6g} >= 1 is outside the unit disk"
            )

    def alpha(self, n: int) -> complex:
        if self.half_line and n < 0:
            raise MissingCoefficientError(f"half-line sequence has no index {n}")
        if n not in self.coefficients:
            if self.generator is None:
                raise MissingCoefficientError(f"coefficient alpha_{n} not available")
            a = complex(self.generator(n))
            self._validate(n, a)
            self.coefficients[n] = a
        return complex(self.coefficients[n])

    def rho(self, n: int) -> float:
        return math.sqrt(1.0 - abs(self.alpha(n)) ** 2)

    @classmethod
    def constant(cls, value: complex, half_line: bool = True) -> "VerblunskySequence":
        return cls({}, half_line=half_line, generator=lambda n: value)

    @classmethod
    def from_function(cls, fn, half_line: bool = True) -> "VerblunskySequence":
        return cls({}, half_line=half_line, generator=fn)

    @classmethod
    def from_file(cls, path, half_line: bool = True) -> "VerblunskySequence":
        """Read the plain-text format: one line per index, ``n re(alpha) im(alpha)``."""
        coeffs = {}
        for line in Path(path).read_text().splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"malformed Verblunsky line: {line!r}")
            n = int(parts[0])
            coeffs[n] = complex(float(parts[1]), float(parts[2]))
        return cls(coeffs, half_line=half_line)

    def to_file(self, path):
        lines = [
            f"{n} {float(v.real)!r} {float(v.imag)!r}"
            for n, v in sorted(self.coefficients.items())
        ]
        Path(path).write_text("\n".join(lines) + "\n")


def _alpha_array(alpha_at, lo: int, hi: int) -> np.ndarray:
    """Coefficients alpha_n for n in [lo-2, hi], as one contiguous array."""
    return np.array([alpha_at(n) for n in range(lo - 2, hi + 1)], dtype=complex)


def _cmv_diagonals(alpha_at, lo: int, hi: int) -> np.ndarray:
    """Five diagonals (column-aligned) of the CMV pattern on columns [lo, hi)."""
    a = _alpha_array(alpha_at, lo, hi)
    rho = np.sqrt(1.0 - np.abs(a) ** 2)
    js = np.arange(lo, hi)
    idx = js - (lo - 2)
    a_j, a_jm1, a_jm2, a_jp1 = a[idx], a[idx - 1], a[idx - 2], a[idx + 1]
    r_j, r_jm1, r_jm2, r_jp1 = rho[idx], rho[idx - 1], rho[idx - 2], rho[idx + 1]
    even = js % 2 == 0
    odd = ~even
    d = np.zeros((5, hi - lo), dtype=complex)
    d[0][even] = (r_jm1 * r_jm2)[even]
    d[1][even] = (-r_jm1 * a_jm2)[even]
    d[1][odd] = (np.conj(a_j) * r_jm1)[odd]
    d[2] = -np.conj(a_j) * a_jm1
    d[3][even] = (-r_j * a_jm1)[even]
    d[3][odd] = (np.conj(a_jp1) * r_j)[odd]
    d[4][odd] = (r_jp1 * r_j)[odd]
    return d


def _half_line_alpha_at(alphas: VerblunskySequence, alpha_cap=None):
    """Coefficient accessor with the alpha_{-1} = -1 boundary convention.

    ``alpha_cap``, when given as (index, value), overrides one coefficient;
    indices at or beyond it read as the override / zero (paraorthogonal use).
    """

    def at(n):
        if n == -1:
            return -1.0 + 0.0j
        if n < -1:
            return 0.0 + 0.0j
        if alpha_cap is not None:
            cap_index, cap_value = alpha_cap
            if n == cap_index:
                return cap_value
            if n > cap_index:
                return 0.0 + 0.0j
        return alphas.alpha(n)

    return at


def build_half_line_cmv(alphas: VerblunskySequence, size: int) -> BandedUnitary:
    """Top-left ``size`` x ``size`` window of the half-line CMV matrix."""
    if not alphas.half_line:
        raise WindowAlignmentError("half-line builder needs a half-line sequence")
    if size < 2:
        raise WindowAlignmentError("size must be >= 2")
    at = _half_line_alpha_at(alphas)
    diagonals = _cmv_diagonals(at, 0, size)
    return BandedUnitary(
        0,
        diagonals,
        half_line=True,
        rebuild=lambda lo, hi: build_half_line_cmv(alphas, hi),
    )


def build_extended_cmv(alphas: VerblunskySequence, window) -> BandedUnitary:
    """Window of the extended (whole-line) CMV matrix on columns [lo, hi).

    The window must be even-aligned: the main-diagonal entry at index 0 is
    pinned to -conj(alpha_0) * alpha_{-1} and the band pattern is fixed by
    absolute index parity.
    """
    lo, hi = window
    if alphas.half_line:
        raise WindowAlignmentError("extended builder needs a two-sided sequence")
    if lo % 2 != 0 or hi % 2 != 0:
        raise WindowAlignmentError(f"window [{lo}, {hi}) is not even-aligned")
    if hi - lo < 6:
        raise WindowAlignmentError("window length must be >= 6")

    def rebuild(new_lo, new_hi):
        new_lo -= new_lo % 2
        new_hi += new_hi % 2
        return build_extended_cmv(alphas, (new_lo, new_hi))

    diagonals = _cmv_diagonals(alphas.alpha, lo, hi)
    return BandedUnitary(lo, diagonals, half_line=False, rebuild=rebuild)


def paraorthogonal_truncation(
    alphas: VerblunskySequence, N: int, boundary_phase: complex = 1.0 + 0.0j
) -> np.ndarray:
    """Dense N x N unitary obtained by moving alpha_{N-1} to the unit circle."""
    if N < 1:
        raise WindowAlignmentError("truncation size must be >= 1")
    b = complex(boundary_phase)
    if abs(abs(b) - 1.0) > 1e-12:
        raise CoefficientDomainError(f"|boundary_phase| = {abs(b):.6g} != 1")
    b /= abs(b)
    at = _half_line_alpha_at(alphas, alpha_cap=(N - 1, b))
    diagonals = _cmv_diagonals(at, 0, N)
    return BandedUnitary(0, diagonals, half_line=True).dense()


def paraorthogonal_spectrum(
    alphas: VerblunskySequence, N: int, boundary_phase: complex = 1.0 + 0.0j
) -> DiscreteMeasure:
    """Atomic approximation of the spectral measure of (C, delta_0).

    Eigen-decomposes the paraorthogonal truncation; atoms are eigenvalues,
    weights the squared delta_0 components of the (orthonormal) eigenvectors.
    """
    U = paraorthogonal_truncation(alphas, N, boundary_phase)
    try:
        T, Q = scipy.linalg.schur(U, output="complex")
    except Exception as exc:  # pragma: no cover - LAPACK failure path
        raise NumericalError(f"Schur decomposition failed: {exc}") from exc
    offdiag = np.max(np.abs(T - np.diag(np.diag(T)))) if N > 1 else 0.0
    if offdiag > 1e-8 * N:
        raise NumericalError(
            f"truncation not numerically normal: Schur off-diagonal {offdiag:.3g}"
        )
    z = np.diag(T).copy()
    w = np.abs(Q[0, :]) ** 2
    return DiscreteMeasure(z, w, eigenvectors=Q, truncation=U)


def truncation_moment(alphas: VerblunskySequence, k: int) -> complex:
    """Fourier moment <delta_0, C^k delta_0> by exact half-line evolution."""
    size = 2 * k + 8
    U = build_half_line_cmv(alphas, size)
    psi = State.delta(0)
    for _ in range(k):
        psi = apply(U, psi)
    return psi.amplitude(0)
