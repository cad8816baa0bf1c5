"""Exact evolution, time averages, transport quantities, resolvent identity."""

import numpy as np
import pytest

from cmvdyn.banded import State
from cmvdyn.cmv import VerblunskySequence, build_extended_cmv
from cmvdyn.dynamics import (
    evolve,
    exponential_cutoff,
    moment_curve,
    parseval_check,
    pin_bound_check,
    pin_bound_table,
    rage_check,
    time_average,
    transport_exponent,
)
from cmvdyn.errors import ResourceBudgetError
from cmvdyn.qwalk import CoinSequence, build_walk_operator


def free_operator(width=16):
    alphas = VerblunskySequence.constant(0.0, half_line=False)
    return build_extended_cmv(alphas, (-width, width))


def test_evolution_norms_random_walk():
    U = build_walk_operator(CoinSequence.random(0), (-8, 8))
    rec = evolve(U, State.delta(0), 50)
    assert np.max(np.abs(rec.norms() - 1.0)) < 1e-12


def test_free_case_is_a_shift():
    rec = evolve(free_operator(), State.delta(0), 8)
    for k, state in enumerate(rec.states):
        lo, probs = state.probabilities()
        assert len(probs) == 1
        assert probs[0] == pytest.approx(1.0, abs=1e-14)


def test_free_first_moment_closed_form():
    # time-averaged first moment of a ballistic shift started at 0:
    # position after k steps is 2k... sites weighted (|n| + 1)
    U = free_operator(64)
    curve = moment_curve(U, State.delta(0), [4, 8, 16], 1.0)
    for K, value in curve.items():
        expect = np.mean([2.0 * k + 1.0 for k in range(K)])
        assert value == pytest.approx(expect, rel=1e-14)


def test_budget_error_reports_admissible_horizon():
    U = free_operator()
    with pytest.raises(ResourceBudgetError) as info:
        evolve(U, State.delta(0), 10_000, budget=1000)
    K = info.value.admissible
    evolve(U, State.delta(0), K, budget=1000)  # must fit
    with pytest.raises(ResourceBudgetError):
        evolve(U, State.delta(0), K + 1, budget=1000)


def test_time_average_modes():
    f = np.arange(10.0)
    assert time_average(f, 10) == pytest.approx(4.5)
    K = 8
    n = exponential_cutoff(K)
    g = np.ones(n)
    # exponential weights of a constant sequence sum to 2/K * 1/(1-e^(-2/K))
    expect = (2.0 / K) / (1.0 - np.exp(-2.0 / K))
    assert time_average(g, K, mode="exponential") == pytest.approx(expect, rel=1e-12)
    with pytest.raises(ValueError):
        time_average(np.ones(5), K, mode="exponential")  # tail not negligible


def test_exponential_cutoff_tail_is_negligible():
    for K in (4, 32, 256):
        n = exponential_cutoff(K, tol=1e-14)
        tail = np.exp(-2.0 * n / K) / (1.0 - np.exp(-2.0 / K))
        assert tail < 1e-14


def test_transport_exponent_recovers_power_law():
    Ks = [2**j for j in range(4, 12)]
    curve = {K: K**0.7 for K in Ks}
    est = transport_exponent(curve, 1.0)
    assert est.slope == pytest.approx(0.7, abs=1e-9)
    assert est.beta_lower == pytest.approx(0.7, abs=1e-9)
    assert est.beta_upper == pytest.approx(0.7, abs=1e-9)


def test_transport_exponent_clamped_to_ballistic_range():
    est = transport_exponent({16: 16.0**1.4, 64: 64.0**1.4}, 1.0)
    assert est.slope == 1.0
    est = transport_exponent({16: 0.9, 64: 0.5}, 1.0)
    assert est.slope == 0.0


def test_parseval_identity_small_horizon():
    U = build_walk_operator(CoinSequence.random(2), (-8, 8))
    lhs, rhs, reldiff = parseval_check(U, State.delta(0), 0, 16)
    assert reldiff < 1e-8
    assert lhs > 0 and rhs > 0


def test_pin_bound_table_flags_unbounded_ratio():
    good = {(N, K): 0.5 * N / K for K in (16, 64, 256) for N in (4, 8)}
    assert pin_bound_table(good, 0.5).verdict == "consistent"
    bad = dict(good)
    bad[(4, 256)] = 1e6
    assert pin_bound_table(bad, 0.5).verdict == "inconsistent"


def test_pin_and_rage_checks_on_rotation_walk():
    U = build_walk_operator(CoinSequence.rotation(np.pi / 4), (-64, 64))
    check = pin_bound_check(U, State.delta(0), 1.0, [4, 8], [16, 32, 64])
    assert check.verdict == "consistent"
    check = rage_check(U, State.delta(0), 8, 1, 1.0, [16, 32, 64])
    assert check.verdict in ("consistent", "inconsistent")
    assert len(check.rows) == 3
