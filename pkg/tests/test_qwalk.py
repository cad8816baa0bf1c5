"""Coined-walk operator construction and the CMV gauge conjugation."""

import numpy as np
import pytest

from cmvdyn.banded import State, apply, interior_gram_deviation
from cmvdyn.errors import GaugeDegenerateError
from cmvdyn.qwalk import (
    Coin,
    CoinSequence,
    build_walk_operator,
    cgmv_gauge,
    gauged_cmv,
    verify_gauge_equivalence,
)


def test_coin_unitarity_enforced():
    with pytest.raises(ValueError):
        Coin(1.0, 0.0, 0.0, 0.5)
    c = Coin.rotation(0.3)
    M = c.matrix()
    assert np.max(np.abs(M.conj().T @ M - np.eye(2))) < 1e-14


def test_walk_entries_follow_coin_blocks():
    coins = CoinSequence.rotation(0.37)
    U = build_walk_operator(coins, (-8, 8))
    for n in range(-2, 3):
        c = coins.coin(n)
        assert U.entry(2 * n, 2 * n - 1) == pytest.approx(c.c21)
        assert U.entry(2 * n, 2 * n + 2) == pytest.approx(c.c11)
        assert U.entry(2 * n + 1, 2 * n - 1) == pytest.approx(c.c22)
        assert U.entry(2 * n + 1, 2 * n + 2) == pytest.approx(c.c12)


def test_identity_coins_give_pure_shift():
    U = build_walk_operator(CoinSequence.constant(Coin.identity()), (-8, 8))
    psi = State.delta(0)
    out = apply(U, psi)
    # a single nonzero amplitude, two sites over
    assert out.norm() == pytest.approx(1.0)
    assert len(out.values) == 1
    assert abs(abs(out.values[0]) - 1.0) < 1e-14


def test_walk_operator_unitary():
    for seed in range(5):
        U = build_walk_operator(CoinSequence.random(seed), (-16, 16))
        assert interior_gram_deviation(U) < 1e-12


@pytest.mark.parametrize(
    "coins",
    [
        CoinSequence.constant(Coin.identity()),
        CoinSequence.rotation(np.pi / 4),
        CoinSequence.random(11),
    ],
)
def test_gauge_equivalence(coins):
    U = build_walk_operator(coins, (-32, 32))
    phases, alphas = cgmv_gauge(coins)
    E = gauged_cmv(coins, (-32, 32))
    assert verify_gauge_equivalence(U, phases, E) < 1e-12


def test_gauge_alphas_vanish_at_odd_indices():
    _, alphas = cgmv_gauge(CoinSequence.random(3))
    for k in range(-9, 10, 2):
        assert alphas.alpha(k) == 0.0


def test_degenerate_coin_rejected():
    coins = CoinSequence.rotation(np.pi / 2)  # zero diagonal entries
    with pytest.raises(GaugeDegenerateError):
        phases, _ = cgmv_gauge(coins)
        phases.lam(4)


def test_coin_file_round_trip(tmp_path):
    coins = CoinSequence.random(5)
    # materialize a finite range before writing
    sample = {n: coins.coin(n) for n in range(-4, 5)}
    seq = CoinSequence(sample)
    path = tmp_path / "coins.txt"
    seq.to_file(path)
    back = CoinSequence.from_file(path)
    for n in range(-4, 5):
        assert np.allclose(back.coin(n).matrix(), seq.coin(n).matrix(), atol=1e-12)
