"""Shared helpers for the test suite."""

import numpy as np

from cmvdyn.cmv import VerblunskySequence


def random_alphas(rng, count, cap=0.9, half_line=True):
    """Random Verblunsky coefficients with |alpha| <= cap."""
    indices = range(count) if half_line else range(-count, count + 1)
    a = rng.uniform(-cap, cap, len(indices)) + 1j * rng.uniform(-cap, cap, len(indices))
    a /= np.maximum(1.0, np.abs(a) / cap)
    return VerblunskySequence(
        {n: complex(a[i]) for i, n in enumerate(indices)}, half_line=half_line
    )


def random_circle_point(rng):
    return complex(np.exp(1j * rng.uniform(0.0, 2.0 * np.pi)))
