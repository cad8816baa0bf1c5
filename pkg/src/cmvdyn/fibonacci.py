"""Fibonacci substitution machinery and the quantum-walk lower-bound formulas.

The substitution sends a -> ab, b -> a; its fixed point u = abaababaabaab...
codes rotation coins C_a, C_b whose walk operator is (already) an extended
CMV matrix with alpha_{2n} = sin(theta at site n) and vanishing odd
coefficients.  The closed-form constants I(z), C(z), gamma_1, gamma_2 and
beta(z) bound the time-averaged transport exponents from below.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from math import isqrt
from typing import Callable, Union

import mpmath
import numpy as np

from .cmv import VerblunskySequence, paraorthogonal_spectrum
from .errors import CoefficientDomainError, ResourceBudgetError
from .measure import DiscreteMeasure
from .qwalk import Coin, CoinSequence

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0

WORD_BUDGET = 1 << 26


def fibonacci_number(n: int) -> int:
    """F_n with F_1 = F_2 = 1."""
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def fib_word(n: int) -> str:
    """The substitution iterate s_n (s_0 = a, s_1 = ab, s_2 = aba, ...)."""
    if n < 0:
        raise ValueError("level must be nonnegative")
    if fibonacci_number(n + 2) > WORD_BUDGET:
        raise ResourceBudgetError(
            f"word length F_{n + 2} exceeds the budget {WORD_BUDGET}"
        )
    prev, cur = "b", "a"
    for _ in range(n):
        prev, cur = cur, cur + prev
    return cur


def _floor_div_golden(m: int) -> int:
    """floor(m / golden) computed exactly in integers (any sign of m)."""
    s = isqrt(5 * m * m)
    # m * sqrt(5) rounded down: s for m >= 0, -s - 1 for m < 0 (irrational)
    num = (s if m >= 0 else -s - 1) - m
    return num // 2 if m != 0 else 0


def subshift_symbol(n: int) -> str:
    """Symbol at position n of the standard two-sided Fibonacci word."""
    return "a" if _floor_div_golden(n + 2) - _floor_div_golden(n + 1) == 1 else "b"


def subshift_window(offset: int, length: int) -> str:
    """Window of the two-sided rotation coding of the Fibonacci subshift.

    For offset >= 0 this coincides with the one-sided fixed point u; every
    finite window occurs as a subword of u.
    """
    if length < 1:
        raise ValueError("length must be positive")
    if length > WORD_BUDGET:
        raise ResourceBudgetError(f"window length exceeds the budget {WORD_BUDGET}")
    return "".join(subshift_symbol(n) for n in range(offset, offset + length))


@dataclass(frozen=True)
class FibonacciParams:
    """Rotation angles and the user-supplied growth constant K(z).

    K(z) enters gamma_2 only; its closed form lives outside this package,
    so it must be supplied (a constant or a callable of z) and is echoed in
    every report.  The default 16 is a placeholder, not a derived value.
    """

    theta_a: float
    theta_b: float
    K_of_z: Union[float, Callable[[complex], float]] = 16.0

    def __post_init__(self):
        for name, th in (("theta_a", self.theta_a), ("theta_b", self.theta_b)):
            if not -math.pi / 2 < th < math.pi / 2:
                raise CoefficientDomainError(
                    f"{name} = {th!r} outside (-pi/2, pi/2)"
                )

    def K(self, z: complex) -> float:
        k = self.K_of_z(z) if callable(self.K_of_z) else float(self.K_of_z)
        if k <= 1.0:
            raise CoefficientDomainError(f"K(z) = {k!r} must exceed 1")
        return k

    def theta(self, symbol: str) -> float:
        return self.theta_a if symbol == "a" else self.theta_b


def coins_from_word(word: str, params: FibonacciParams) -> CoinSequence:
    """Rotation coins along a finite word (site i gets the ith symbol)."""
    return CoinSequence(
        {i: Coin.rotation(params.theta(sym)) for i, sym in enumerate(word)}
    )


def fibonacci_coins(params: FibonacciParams) -> CoinSequence:
    """The full two-sided coin sequence of the Fibonacci quantum walk."""
    return CoinSequence(
        {}, generator=lambda n: Coin.rotation(params.theta(subshift_symbol(n)))
    )


def fibonacci_alphas(params: FibonacciParams, half_line: bool = False) -> VerblunskySequence:
    """Verblunsky coefficients of the gauged walk: sin(theta) at even sites.

    Real rotation coins have positive diagonal entries, so all gauge phases
    are 1 and alpha_{2n} = sin(theta at site n), alpha_{2n+1} = 0.
    """

    def alpha(k):
        if k % 2 != 0:
            return 0.0 + 0.0j
        return complex(math.sin(params.theta(subshift_symbol(k // 2))))

    return VerblunskySequence({}, half_line=half_line, generator=alpha)


def invariant_I(z: complex, params: FibonacciParams) -> float:
    """The closed-form invariant I(z) controlling the trace-map dynamics."""
    z = complex(z)
    if abs(abs(z) - 1.0) > 1e-12:
        raise CoefficientDomainError("z must lie on the unit circle")
    ta, tb = params.theta_a, params.theta_b
    sa, sb = 1.0 / math.cos(ta), 1.0 / math.cos(tb)
    rz = z.real
    rz2 = (z * z).real
    return (
        rz**2 * (sa**2 + sb**2)
        + (rz2 * sa * sb - math.tan(ta) * math.tan(tb)) ** 2
        - 2.0 * (rz**2 * sa**2 * sb**2 * (rz2 - math.sin(ta) * math.sin(tb)))
        - 1.0
    )


def constant_C(z: complex, params: FibonacciParams) -> float:
    """C(z) = max(2 + sqrt(8 + I(z)), cos theta_a, cos theta_b)."""
    I = invariant_I(z, params)
    if I < -8.0:
        raise CoefficientDomainError(
            f"I(z) = {I:.6g} < -8; the constant C(z) is undefined here"
        )
    return max(
        2.0 + math.sqrt(8.0 + I),
        math.cos(params.theta_a),
        math.cos(params.theta_b),
    )


def gamma1(z: complex, params: FibonacciParams) -> float:
    C = constant_C(z, params)
    return math.log1p(1.0 / (4.0 * C * C)) / (16.0 * math.log(GOLDEN))


def gamma2(z: complex, params: FibonacciParams) -> float:
    return 4.0 * math.log2(params.K(z))


def beta_lower_bound(z: complex, params: FibonacciParams) -> float:
    g1 = gamma1(z, params)
    g2 = gamma2(z, params)
    return 2.0 * g1 / (g1 + 2.0 * g2 + 1.0)


def spectrum_approximation(params: FibonacciParams, N: int = 1024) -> DiscreteMeasure:
    """Atoms of the size-N paraorthogonal truncation of the gauged half line.

    An inner approximation of the spectrum used to evaluate the theorem's
    max over supp mu.
    """
    return paraorthogonal_spectrum(fibonacci_alphas(params, half_line=True), N)


def max_beta(params: FibonacciParams, N: int = 1024):
    """max beta(z) over the truncation atoms, with the attaining atom."""
    mu = spectrum_approximation(params, N)
    betas = [beta_lower_bound(z, params) for z in mu.atoms]
    i = int(np.argmax(betas))
    return betas[i], complex(mu.atoms[i])


def _symbol_matrix_mp(z, theta, zeta):
    """Unit-determinant transfer factor for one symbol, at mpmath precision."""
    a = mpmath.mpf(math.sin(theta))
    rho = mpmath.mpf(math.cos(theta))
    return [
        [zeta * z / rho, -zeta * a / rho],
        [-zeta * a * z / rho, zeta / rho],
    ]


def _mat_mul(A, B):
    return [
        [A[0][0] * B[0][0] + A[0][1] * B[1][0], A[0][0] * B[0][1] + A[0][1] * B[1][1]],
        [A[1][0] * B[0][0] + A[1][1] * B[1][0], A[1][0] * B[0][1] + A[1][1] * B[1][1]],
    ]


def trace_map_diagnostic(z: complex, params: FibonacciParams, n_max: int):
    """Half traces x_n of normalized Fibonacci-block products, with the
    conserved quantity f_n = x_{n+1}^2 + x_n^2 + x_{n-1}^2
    - 2 x_{n+1} x_n x_{n-1} - 1.

    Each symbol contributes one unit-determinant factor zeta T(z, sin theta)
    with zeta = exp(-Log(z)/2) (principal branch); x_{-1}, x_0, x_1 come
    from direct matrix products and the rest follow the trace recursion
    x_{n+1} = 2 x_n x_{n-1} - x_{n-2}.  Values grow doubly exponentially,
    so the recursion runs in adaptive-precision arithmetic; conservation of
    f_n to absolute 1e-8 is the meaningful diagnostic.  Returns a list of
    rows (n, x_n, f_n) for n = 0 .. n_max - 1; f_n is reported for
    side-by-side comparison against I(z).
    """
    if n_max > 25:
        raise ValueError("n_max above 25 is outside the supported range")
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    z = complex(z)
    if abs(abs(z) - 1.0) > 1e-12:
        raise CoefficientDomainError("z must lie on the unit circle")

    def run(dps):
        with mpmath.workdps(dps):
            zz = mpmath.mpc(z)
            zeta = mpmath.exp(-mpmath.log(zz) / 2)
            Ma = _symbol_matrix_mp(zz, params.theta_a, zeta)
            Mb = _symbol_matrix_mp(zz, params.theta_b, zeta)
            # s_{-1} = "b", s_0 = "a", s_1 = "ab" (second symbol acts last)
            M1 = _mat_mul(Mb, Ma)
            xs = [
                (Mb[0][0] + Mb[1][1]) / 2,
                (Ma[0][0] + Ma[1][1]) / 2,
                (M1[0][0] + M1[1][1]) / 2,
            ]
            while len(xs) < n_max + 2:
                xs.append(2 * xs[-1] * xs[-2] - xs[-3])
            fr = [
                xs[i + 1] ** 2 + xs[i] ** 2 + xs[i - 1] ** 2
                - 2 * xs[i + 1] * xs[i] * xs[i - 1] - 1
                for i in range(1, n_max + 1)
            ]
            maxmag = max(abs(x) for x in xs)
            return xs, fr, float(mpmath.log(maxmag, 10)) if maxmag > 0 else 0.0

    _, _, mag10 = run(50)
    dps = max(50, int(3.2 * mag10) + 40)
    xs, fr, _ = run(dps)

    def to_float(v):
        try:
            return complex(v)
        except (OverflowError, ValueError):
            return complex("inf")

    # xs[i] holds x_{i-1}, fr[j] holds f_j
    return [(n, to_float(xs[n + 1]), to_float(fr[n])) for n in range(n_max)]
