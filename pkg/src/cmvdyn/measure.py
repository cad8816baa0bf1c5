"""Diagnostics on atomic approximations of spectral measures on the circle.

Every integral here is a finite sum over atoms, so the only numerical error
is roundoff.  Continuity properties of the underlying measure show up as
scaling regimes that hold down to the resolution scale ~ 2*pi / (number of
atoms); below that, atomic artifacts dominate and probes attach warnings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import CapabilityError, CoefficientDomainError, NumericalError


@dataclass(frozen=True)
class DiscreteMeasure:
    """Atomic measure sum_j w_j * delta(z_j) with |z_j| = 1.

    ``eigenvectors`` and ``truncation`` are optional: when the measure comes
    from a paraorthogonal truncation they hold the orthonormal eigenvector
    matrix (columns) and the dense finite unitary, enabling spectral
    projections and exact finite evolution.
    """

    atoms: np.ndarray
    weights: np.ndarray
    eigenvectors: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    truncation: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "atoms", np.asarray(self.atoms, dtype=complex))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        if self.atoms.shape != self.weights.shape:
            raise ValueError("atoms and weights must have the same length")
        bad = np.max(np.abs(np.abs(self.atoms) - 1.0)) if len(self.atoms) else 0.0
        if bad > 1e-12:
            raise CoefficientDomainError(f"atom off the unit circle by {bad:.3g}")
        if np.any(self.weights < -1e-15):
            raise ValueError("negative atom weight")

    def __len__(self) -> int:
        return len(self.atoms)

    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    def angles(self) -> np.ndarray:
        return np.mod(np.angle(self.atoms), 2.0 * np.pi)

    def resolution(self) -> float:
        """Angular scale below which the atomic structure is visible."""
        return 2.0 * np.pi / max(len(self), 1)

    @classmethod
    def uniform(cls, M: int) -> "DiscreteMeasure":
        """M equal atoms at the Mth roots of unity (Lebesgue proxy)."""
        z = np.exp(2j * np.pi * np.arange(M) / M)
        return cls(z, np.full(M, 1.0 / M))

    @classmethod
    def single_atom(cls, z: complex, w: float = 1.0) -> "DiscreteMeasure":
        return cls(np.array([z]), np.array([w]))

    @classmethod
    def from_file(cls, path) -> "DiscreteMeasure":
        """Read the plain-text format: one line per atom, ``re(z) im(z) w``."""
        zs, ws = [], []
        for line in Path(path).read_text().splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"malformed measure line: {line!r}")
            zs.append(complex(float(parts[0]), float(parts[1])))
            ws.append(float(parts[2]))
        return cls(np.array(zs), np.array(ws))

    def to_file(self, path):
        lines = [
            f"{float(z.real)!r} {float(z.imag)!r} {float(w)!r}"
            for z, w in zip(self.atoms, self.weights)
        ]
        Path(path).write_text("\n".join(lines) + "\n")


@dataclass(frozen=True)
class ArcPartition:
    """Dyadic partition of the circle into 2^N half-open arcs.

    Arc j is [theta_j, theta_{j+1}) with theta_j = j * pi / 2^(N-1).
    """

    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("dyadic level must be >= 1")

    @property
    def count(self) -> int:
        return 2 ** self.N

    @property
    def width(self) -> float:
        return np.pi / 2 ** (self.N - 1)

    def arc_index(self, angles) -> np.ndarray:
        angles = np.mod(np.asarray(angles, dtype=float), 2.0 * np.pi)
        return np.minimum((angles / self.width).astype(int), self.count - 1)

    def masses(self, mu: DiscreteMeasure) -> np.ndarray:
        idx = self.arc_index(mu.angles())
        return np.bincount(idx, weights=mu.weights, minlength=self.count)


def fejer_integral(mu: DiscreteMeasure, z: complex, K: int) -> float:
    """sum_j w_j |(q_j^K - 1)/(q_j - 1)| with q_j = conj(z) z_j.

    The removable singularity at q = 1 evaluates to K.  For a measure with
    a uniformly alpha-Holder component this grows no faster than log K; the
    log K rate is sharp for Lebesgue measure.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    q = np.conj(complex(z)) * mu.atoms
    denom = q - 1.0
    near = np.abs(denom) < 1e-12
    vals = np.empty(len(mu), dtype=float)
    vals[near] = float(K)
    safe = ~near
    vals[safe] = np.abs((q[safe] ** K - 1.0) / denom[safe])
    return float(np.sum(mu.weights * vals))


def strichartz_average(mu: DiscreteMeasure, f, K: int) -> float:
    """Time average (1/K) sum_{j<K} |(f mu)-hat(j)|^2 for the atomic measure."""
    if K < 1:
        raise ValueError("K must be >= 1")
    f = np.asarray(f, dtype=complex)
    if f.shape != mu.atoms.shape:
        raise ValueError("one weight per atom required")
    coeff = mu.weights * f
    zinv = np.conj(mu.atoms)  # |z| = 1, so z^{-1} = conj(z)
    acc = 0.0
    powers = np.ones(len(mu), dtype=complex)
    for _ in range(K):
        acc += abs(np.sum(coeff * powers)) ** 2
        powers *= zinv
    return acc / K


def uah_constant(mu: DiscreteMeasure, alpha: float, arc_lengths) -> float:
    """Sliding-arc lower estimate of the best uniform-Holder constant.

    Scans arcs of the requested lengths centered at every atom and at
    midpoints between consecutive atoms, returning max mu(I) / |I|^alpha.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    lengths = np.asarray(arc_lengths, dtype=float)
    if np.any(lengths <= 0) or np.any(lengths > 2.0 * np.pi):
        raise ValueError("arc lengths must lie in (0, 2*pi]")
    ang = np.sort(mu.angles())
    order = np.argsort(mu.angles())
    w_sorted = mu.weights[order]
    csum = np.concatenate([[0.0], np.cumsum(w_sorted)])
    total = csum[-1]
    mids = (ang + np.roll(ang, -1)) / 2.0
    mids[-1] = np.mod((ang[-1] + ang[0] + 2.0 * np.pi) / 2.0, 2.0 * np.pi)
    centers = np.concatenate([ang, mids])

    def arc_mass(center, length):
        a = center - length / 2.0
        b = center + length / 2.0
        # mass of atoms with angle in [a, b) modulo 2*pi
        if b - a >= 2.0 * np.pi:
            return total
        a = np.mod(a, 2.0 * np.pi)
        b = np.mod(b, 2.0 * np.pi)
        ia = np.searchsorted(ang, a, side="left")
        ib = np.searchsorted(ang, b, side="left")
        if a <= b:
            return csum[ib] - csum[ia]
        return (total - csum[ia]) + csum[ib]

    best = 0.0
    for length in lengths:
        scale = length ** alpha
        for c in centers:
            best = max(best, arc_mass(c, length) / scale)
    return best


def caratheodory_F(mu: DiscreteMeasure, z: complex) -> complex:
    """Herglotz transform sum_j w_j (z_j + z)/(z_j - z) for |z| < 1."""
    z = complex(z)
    if abs(z) >= 1.0:
        raise CoefficientDomainError(f"|z| = {abs(z):.6g} must be < 1")
    return complex(np.sum(mu.weights * (mu.atoms + z) / (mu.atoms - z)))


@dataclass(frozen=True)
class ProbeResult:
    """Scaling table of a boundary probe plus its fitted log-log slope."""

    r_values: np.ndarray
    values: np.ndarray
    slope: float
    warnings: tuple = ()


def alpha_derivative_probe(mu: DiscreteMeasure, z0: complex, alpha: float, r_grid) -> ProbeResult:
    """Boundary scaling probe (1-r)^(1-alpha) |F(r z0)| along r -> 1.

    Bounded values indicate a finite upper alpha-derivative of the measure
    at z0; divergence indicates an infinite one.  The fitted slope is the
    least-squares slope of log value against log(1-r), restricted to radii
    the atomic resolution can support.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    rs = np.asarray(r_grid, dtype=float)
    if np.any(rs <= 0.0) or np.any(rs >= 1.0):
        raise ValueError("r grid must lie in (0, 1)")
    z0 = complex(z0)
    z0 /= abs(z0)
    vals = np.array(
        [(1.0 - r) ** (1.0 - alpha) * abs(caratheodory_F(mu, r * z0)) for r in rs]
    )
    guard = 10.0 * mu.resolution()
    ok = (1.0 - rs) >= guard
    warnings = ()
    if not np.all(ok):
        warnings = (
            f"{int(np.sum(~ok))} radii are finer than the resolution guard "
            f"(1 - r < {guard:.3g}); below it atomic structure dominates",
        )
    fit = ok if np.sum(ok) >= 2 else np.ones(len(rs), dtype=bool)
    if np.sum(fit) >= 2 and np.any(vals[fit] > 0):
        x = np.log(1.0 - rs[fit])
        y = np.log(np.maximum(vals[fit], 1e-300))
        slope = float(np.polyfit(x, y, 1)[0])
    else:
        slope = float("nan")
        warnings = warnings + ("too few radii for a slope fit",)
    return ProbeResult(rs, vals, slope, warnings)


def dyadic_quantities(mu: DiscreteMeasure, N: int, alpha: float):
    """Light-arc index set and its total mass at dyadic level N.

    Returns (I, b) where I = {j : mu(arc_j) < 2^(-N alpha)} and b is the
    total measure carried by those arcs.
    """
    part = ArcPartition(N)
    masses = part.masses(mu)
    threshold = 2.0 ** (-N * alpha)
    idx = np.nonzero(masses < threshold)[0]
    return idx, float(np.sum(masses[idx]))


def gsb1_level(K: int, epsilon: float) -> int:
    """Dyadic level N with 2^(N-2) <= K pi / sqrt(epsilon) < 2^(N-1)."""
    x = K * np.pi / math.sqrt(epsilon)
    N = int(math.floor(math.log2(x))) + 2
    # guard against floating log2 landing on a power-of-two edge
    while 2.0 ** (N - 1) <= x:
        N += 1
    while 2.0 ** (N - 2) > x:
        N -= 1
    return N


def gsb1_check(mu: DiscreteMeasure, psi, F_set, K: int, epsilon: float):
    """Both sides of the dyadic-arc bound on time-averaged site probabilities.

    lhs = (1/K) sum_{n in F} sum_{l<K} |<phi_n, psi(l)>|^2 under the finite
    truncation; rhs = 2 eps + (8 pi / sqrt(eps)) sum_{n in F} sum_j
    |<phi_n, P_j psi>|^2 with P_j the spectral projection onto the jth
    dyadic arc at the level fixed by K and eps.  Returns (lhs, rhs).
    """
    if mu.eigenvectors is None or mu.truncation is None:
        raise CapabilityError(
            "measure lacks eigenvector/truncation data; build it via "
            "paraorthogonal_spectrum"
        )
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if K < 1:
        raise ValueError("K must be >= 1")
    psi = np.asarray(psi, dtype=complex)
    U = mu.truncation
    Q = mu.eigenvectors
    if psi.shape != (U.shape[0],):
        raise ValueError("psi must live on the truncation's basis")
    F = np.asarray(sorted(F_set), dtype=int)

    lhs = 0.0
    state = psi.copy()
    for _ in range(K):
        if len(F):
            lhs += float(np.sum(np.abs(state[F]) ** 2))
        state = U @ state
    lhs /= K

    N = gsb1_level(K, epsilon)
    part = ArcPartition(N)
    arc_of_atom = part.arc_index(mu.angles())
    coeffs = Q.conj().T @ psi
    proj_sq = 0.0
    for j in np.unique(arc_of_atom):
        cols = np.nonzero(arc_of_atom == j)[0]
        piece = Q[:, cols] @ coeffs[cols]
        if len(F):
            proj_sq += float(np.sum(np.abs(piece[F]) ** 2))
    rhs = 2.0 * epsilon + (8.0 * np.pi / math.sqrt(epsilon)) * proj_sq
    if not np.isfinite(lhs) or not np.isfinite(rhs):
        raise NumericalError("non-finite value in dyadic-arc bound")
    return lhs, rhs
