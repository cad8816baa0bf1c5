"""Transfer matrices, first/second-kind polynomials, and power-law fits.

The local norm ||a||_L is the square root of

    sum_{n <= floor(L)} |a_n|^2 + (L - floor(L)) |a_{floor(L)+1}|^2,

a genuine l^2 norm at integer L with the square linearly interpolated in
between.  Running transfer-matrix products are renormalized whenever an
entry passes 1e150 and the accumulated log-scale is carried alongside, so
off-spectrum (exponentially growing) products never overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .cmv import VerblunskySequence
from .errors import (
    CoefficientDomainError,
    NumericalError,
    ResourceBudgetError,
)

RESCALE_THRESHOLD = 1e150


def transfer_matrix(z: complex, alpha: complex) -> np.ndarray:
    """Single-step transfer matrix (1/rho) [[z, -conj(a)], [-a z, 1]]."""
    if abs(alpha) >= 1.0:
        raise CoefficientDomainError(f"|alpha| = {abs(alpha):.6g} >= 1")
    rho = math.sqrt(1.0 - abs(alpha) ** 2)
    z = complex(z)
    return np.array(
        [[z, -np.conj(alpha)], [-alpha * z, 1.0]], dtype=complex
    ) / rho


@dataclass(frozen=True)
class OpucSequences:
    """First/second-kind polynomial values along one z, with log rescaling.

    The true value of any entry at index n is the stored value times
    exp(log_scale[n]); phi/phi_star/psi/psi_star share one scale since the
    same matrix product generates all four.
    """

    z: complex
    phi: np.ndarray
    phi_star: np.ndarray
    psi: np.ndarray
    psi_star: np.ndarray
    log_scale: np.ndarray

    def __len__(self) -> int:
        return len(self.phi)

    def wronskian_defect(self, n: int) -> float:
        """Relative deviation of phi_n psi*_n - psi_n phi*_n from -2 z^n."""
        w = (self.phi[n] * self.psi_star[n] - self.psi[n] * self.phi_star[n])
        target = -2.0 * complex(self.z) ** n
        # the identity is exact in true scale; compare in stored scale
        scaled_target = target * math.exp(-2.0 * self.log_scale[n])
        return abs(w - scaled_target) / abs(scaled_target)


def opuc_polynomials(
    alphas: VerblunskySequence, z: complex, n_max: int
) -> OpucSequences:
    """Run the products T(z, a_{n-1}) ... T(z, a_0) on (1,1) and (1,-1)."""
    z = complex(z)
    vp = np.array([1.0, 1.0], dtype=complex)
    vq = np.array([1.0, -1.0], dtype=complex)
    phi = np.empty(n_max + 1, dtype=complex)
    phi_s = np.empty(n_max + 1, dtype=complex)
    psi = np.empty(n_max + 1, dtype=complex)
    psi_s = np.empty(n_max + 1, dtype=complex)
    logs = np.zeros(n_max + 1)
    scale = 0.0
    for n in range(n_max + 1):
        phi[n], phi_s[n] = vp
        psi[n], psi_s[n] = vq
        logs[n] = scale
        if n == n_max:
            break
        T = transfer_matrix(z, alphas.alpha(n))
        vp = T @ vp
        vq = T @ vq
        big = max(np.max(np.abs(vp)), np.max(np.abs(vq)))
        if big > RESCALE_THRESHOLD:
            vp /= big
            vq /= big
            scale += math.log(big)
    return OpucSequences(z, phi, phi_s, psi, psi_s, logs)


def opuc_polynomials_mp(alphas: VerblunskySequence, z: complex, n_max: int, dps: int):
    """High-precision variant: returns (phi, phi_star, psi, psi_star) lists.

    Arbitrary precision removes both overflow and the catastrophic
    cancellation that makes the Wronskian identity untestable in doubles
    once the products grow beyond ~1e8.
    """
    with mpmath.workdps(dps):
        zz = mpmath.mpc(z)
        vp = [mpmath.mpc(1), mpmath.mpc(1)]
        vq = [mpmath.mpc(1), mpmath.mpc(-1)]
        phi, phi_s, psi, psi_s = [], [], [], []
        for n in range(n_max + 1):
            phi.append(vp[0])
            phi_s.append(vp[1])
            psi.append(vq[0])
            psi_s.append(vq[1])
            if n == n_max:
                break
            a = mpmath.mpc(alphas.alpha(n))
            rho = mpmath.sqrt(1 - abs(a) ** 2)
            t11, t12 = zz / rho, -mpmath.conj(a) / rho
            t21, t22 = -a * zz / rho, 1 / rho
            vp = [t11 * vp[0] + t12 * vp[1], t21 * vp[0] + t22 * vp[1]]
            vq = [t11 * vq[0] + t12 * vq[1], t21 * vq[0] + t22 * vq[1]]
        return phi, phi_s, psi, psi_s


def local_norm(a, L: float) -> float:
    """Interpolated local l^2 norm ||a||_L (returns the norm, not its square)."""
    if L < 0:
        raise ValueError("L must be nonnegative")
    floor = int(math.floor(L))
    frac = L - floor
    a = np.asarray(a)
    if len(a) < floor + 2:
        raise ValueError(f"need entries through index {floor + 1}, got {len(a)}")
    sq = float(np.sum(np.abs(a[: floor + 1]) ** 2)) + frac * abs(a[floor + 1]) ** 2
    return math.sqrt(sq)


def _log_norm_sq(values: np.ndarray, logs: np.ndarray, L: float) -> float:
    """log of ||a||^2_L for a log-rescaled sequence (true a = values*e^logs)."""
    floor = int(math.floor(L))
    frac = L - floor
    if len(values) < floor + 2:
        raise ValueError(f"need entries through index {floor + 1}")
    seg_logs = logs[: floor + 2]
    ref = float(np.max(seg_logs))
    w = np.abs(values[: floor + 2]) ** 2 * np.exp(2.0 * (seg_logs - ref))
    total = float(np.sum(w[: floor + 1])) + frac * w[floor + 1]
    return 2.0 * ref + math.log(max(total, 1e-300))


def jl_length(
    alphas: VerblunskySequence,
    z: complex,
    r: float,
    max_length: int = 1 << 22,
) -> float:
    """Length L(r) solving (1 - r) ||phi||_L ||psi||_L = sqrt(2).

    The product is continuous and nondecreasing in L and equals (1-r) < sqrt(2)
    at L = 0, so bracket doubling followed by bisection applies.
    """
    if not 0.0 <= r < 1.0:
        raise ValueError("r must lie in [0, 1)")
    target = math.log(math.sqrt(2.0) / (1.0 - r))

    n_max = 64
    seqs = opuc_polynomials(alphas, z, n_max)

    def logprod(L):
        return 0.5 * (
            _log_norm_sq(seqs.phi, seqs.log_scale, L)
            + _log_norm_sq(seqs.psi, seqs.log_scale, L)
        )

    hi = float(n_max - 2)
    while logprod(hi) < target:
        if n_max >= max_length:
            raise ResourceBudgetError(
                f"norm product still below threshold at L = {hi:.4g}",
                admissible=n_max,
            )
        n_max *= 2
        seqs = opuc_polynomials(alphas, z, n_max)
        hi = float(n_max - 2)
    lo = 0.0
    # assert the bracket the bisection relies on
    if logprod(lo) >= target:
        raise NumericalError("norm product already above threshold at L = 0")
    while hi - lo > 1e-9 * max(hi, 1.0):
        mid = 0.5 * (lo + hi)
        if logprod(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def jl_ratio_check(alphas: VerblunskySequence, mu, z: complex, r_grid):
    """Ratio |F(r z)| / (||psi||_L(r) / ||phi||_L(r)) over a radius grid.

    The two quantities agree up to a universal multiplicative constant; the
    empirical band max(ratio, 1/ratio) is reported.  ``mu`` should be the
    spectral-measure approximation of the same coefficient sequence.
    """
    from .measure import caratheodory_F

    z = complex(z)
    z /= abs(z)
    rows = []
    warnings = []
    guard = 10.0 * mu.resolution()
    for r in r_grid:
        if 1.0 - r < guard:
            warnings.append(
                f"r = {r!r} is finer than the measure resolution; ratio may "
                "reflect atomic artifacts"
            )
        L = jl_length(alphas, z, r)
        seqs = opuc_polynomials(alphas, z, max(int(L) + 2, 4))
        norm_ratio = math.exp(
            0.5
            * (
                _log_norm_sq(seqs.psi, seqs.log_scale, L)
                - _log_norm_sq(seqs.phi, seqs.log_scale, L)
            )
        )
        Fval = abs(caratheodory_F(mu, r * z))
        rows.append((r, L, Fval, norm_ratio, Fval / norm_ratio))
    ratios = np.array([row[4] for row in rows])
    band = float(max(np.max(ratios), 1.0 / np.min(ratios)))
    return rows, band, warnings


@dataclass(frozen=True)
class SolutionNorms:
    """Sampled local norms ||xi||_L of one transfer-matrix solution."""

    L_samples: np.ndarray
    norms: np.ndarray  # stored as log ||xi||_L to survive huge growth

    def norm_at(self, i: int) -> float:
        return math.exp(self.norms[i])


def whole_line_solution(
    alphas: VerblunskySequence,
    z: complex,
    xi0: complex,
    zeta0: complex,
    L_samples,
) -> SolutionNorms:
    """Local norms of the solution (xi_n, zeta_n) = T_n(z) (xi0, zeta0).

    Initial data must satisfy |xi0| = |zeta0| = 1.
    """
    if abs(abs(xi0) - 1.0) > 1e-12 or abs(abs(zeta0) - 1.0) > 1e-12:
        raise ValueError("initial condition must have unimodular components")
    Ls = np.asarray(sorted(L_samples), dtype=float)
    if len(Ls) == 0 or Ls[0] < 0:
        raise ValueError("need nonnegative L samples")
    n_max = int(math.floor(Ls[-1])) + 1
    z = complex(z)
    v = np.array([xi0, zeta0], dtype=complex)
    xi = np.empty(n_max + 1, dtype=complex)
    logs = np.zeros(n_max + 1)
    scale = 0.0
    for n in range(n_max + 1):
        xi[n] = v[0]
        logs[n] = scale
        if n == n_max:
            break
        T = transfer_matrix(z, alphas.alpha(n))
        v = T @ v
        big = np.max(np.abs(v))
        if big > RESCALE_THRESHOLD:
            v /= big
            scale += math.log(big)
    log_norms = np.array([0.5 * _log_norm_sq(xi, logs, L) for L in Ls])
    return SolutionNorms(Ls, log_norms)


def power_law_fit(norms_list) -> tuple[float, float, float]:
    """Growth exponents from local norms over several boundary conditions.

    Fits log ||xi||_L against log L per boundary condition; gamma1 and
    gamma2 are the smallest and largest fitted slopes, and
    alpha = 2 gamma1 / (gamma1 + gamma2) is the implied continuity exponent.
    """
    if len(norms_list) < 1:
        raise ValueError("need at least one boundary condition")
    slopes = []
    for sn in norms_list:
        Ls = np.asarray(sn.L_samples, dtype=float)
        logn = np.asarray(sn.norms, dtype=float)
        if len(Ls) < 2:
            raise ValueError("need at least 2 length samples")
        if np.any(np.diff(logn) < -1e-9):
            raise NumericalError("local norms decreased along L; numerical pathology")
        mask = Ls > 0
        slopes.append(float(np.polyfit(np.log(Ls[mask]), logn[mask], 1)[0]))
    gamma1 = min(slopes)
    gamma2 = max(slopes)
    if gamma1 + gamma2 <= 0:
        return gamma1, gamma2, float("nan")
    return gamma1, gamma2, 2.0 * gamma1 / (gamma1 + gamma2)


def standard_boundary_conditions(count: int = 8):
    """Equidistributed unimodular pairs (1, e^(i pi k / count))."""
    return [
        (1.0 + 0.0j, complex(math.cos(math.pi * k / count), math.sin(math.pi * k / count)))
        for k in range(count)
    ]
