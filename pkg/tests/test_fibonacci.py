"""Fibonacci word combinatorics, lower-bound constants, trace orbits."""

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from cmvdyn.fibonacci import (
    FibonacciParams,
    beta_lower_bound,
    constant_C,
    fib_word,
    fibonacci_alphas,
    fibonacci_coins,
    fibonacci_number,
    gamma1,
    gamma2,
    invariant_I,
    max_beta,
    spectrum_approximation,
    subshift_symbol,
    subshift_window,
    trace_map_diagnostic,
)


def test_fibonacci_numbers():
    assert [fibonacci_number(n) for n in range(1, 11)] == [
        1, 1, 2, 3, 5, 8, 13, 21, 34, 55,
    ]


def test_fib_word_substitution_property():
    for n in range(3, 12):
        assert fib_word(n) == fib_word(n - 1) + fib_word(n - 2)
        assert len(fib_word(n)) == fibonacci_number(n + 2)


def test_subshift_matches_word_prefix():
    assert subshift_window(0, 13) == "abaababaabaab"
    assert subshift_window(0, 55) == fib_word(9)[:55]


@given(st.integers(-10**12, 10**12))
def test_subshift_symbol_matches_high_precision_floor(m):
    # the coding is a first-difference of floor(m / golden); oracle the
    # floors at 60 digits, far beyond any carry ambiguity at this range
    with mp.workdps(60):
        golden = (1 + mp.sqrt(5)) / 2
        step = int(mp.floor((m + 2) / golden)) - int(mp.floor((m + 1) / golden))
    assert subshift_symbol(m) == ("a" if step == 1 else "b")


def test_symbol_frequencies_follow_golden_ratio():
    window = subshift_window(0, 10946)
    golden = (1 + math.sqrt(5)) / 2
    assert window.count("a") / len(window) == pytest.approx(1 / golden, abs=1e-3)


def test_invariant_zero_on_symmetric_points():
    p = FibonacciParams(0.0, 0.0)
    assert abs(invariant_I(1.0 + 0.0j, p)) < 1e-14
    assert abs(invariant_I(1j, p)) < 1e-14
    q = FibonacciParams(math.pi / 6, math.pi / 3)
    assert abs(invariant_I(1.0 + 0.0j, q)) < 1e-12


def test_constant_pipeline_closed_forms():
    p = FibonacciParams(0.0, 0.0, 16.0)
    assert constant_C(1.0 + 0.0j, p) == pytest.approx(2.0 + 2.0 * math.sqrt(2.0))
    assert gamma1(1.0 + 0.0j, p) == pytest.approx(0.0013853329838519003, abs=1e-12)
    assert gamma2(1.0 + 0.0j, p) == pytest.approx(16.0)
    assert beta_lower_bound(1.0 + 0.0j, p) == pytest.approx(
        8.395605032176049e-05, abs=1e-12
    )
    p2 = FibonacciParams(0.0, 0.0, 2.0)
    assert beta_lower_bound(1.0 + 0.0j, p2) == pytest.approx(
        0.00030780439512474, abs=1e-12
    )


def test_coins_and_alphas_follow_the_word():
    p = FibonacciParams(0.2, 0.9)
    coins = fibonacci_coins(p)
    alphas = fibonacci_alphas(p)
    for n in range(-6, 7):
        theta = p.theta(subshift_symbol(n))
        assert coins.coin(n).c11 == pytest.approx(math.cos(theta))
        assert alphas.alpha(2 * n) == pytest.approx(math.sin(theta))
        assert alphas.alpha(2 * n + 1) == 0.0


def test_trace_map_orbit_matches_direct_products():
    p = FibonacciParams(math.pi / 6, math.pi / 3)
    z = complex(np.exp(0.31j))
    rows = trace_map_diagnostic(z, p, 8)
    zeta = np.exp(-0.5 * np.log(z))

    def symbol_matrix(s):
        theta = p.theta(s)
        sec, tan = 1.0 / math.cos(theta), math.tan(theta)
        T = np.array([[z * sec, -tan], [-z * tan, sec]], dtype=complex)
        return zeta * T

    for n in range(1, 8):
        word = fib_word(n)
        M = np.eye(2, dtype=complex)
        for s in word:
            M = symbol_matrix(s) @ M
        assert rows[n][1] == pytest.approx(0.5 * np.trace(M), rel=1e-10, abs=1e-10)


def test_trace_map_fricke_conserved():
    p = FibonacciParams(math.pi / 6, math.pi / 3)
    for z in (1.0 + 0.0j, complex(np.exp(0.77j)), complex(np.exp(2.4j))):
        rows = trace_map_diagnostic(z, p, 15)
        f0 = rows[0][2]
        for n, x, f in rows:
            assert abs(f - f0) <= 1e-8 * max(1.0, abs(f0))


def test_spectrum_and_max_beta():
    p = FibonacciParams(math.pi / 6, math.pi / 3, 16.0)
    mu = spectrum_approximation(p, 128)
    assert mu.total_mass() == pytest.approx(1.0)
    best, at = max_beta(p, 128)
    assert 0.0 < best < 1.0
    assert abs(abs(at) - 1.0) < 1e-8
    assert best <= beta_lower_bound(1.0 + 0.0j, p) + 1e-12


def test_k_constant_validation():
    with pytest.raises(ValueError):
        FibonacciParams(0.1, 0.2, 0.5).K(1.0 + 0.0j)
