from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from gcc_reserving import ClaimsTriangle, PremiumVector, load_wuthrich_merz
from gcc_reserving.triangle import observed_mask

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

N_RANDOM = 20


def random_case(seed: int, size: int, *, monotone: bool = True, noise: float = 0.05):
    """Positive triangle and premiums with development ratios near a decaying pattern.

    With ``monotone`` every observed ratio is >= 1, so the CL pattern is
    non-decreasing.
    """
    rng = np.random.default_rng(seed)
    pi = rng.uniform(800.0, 1200.0, size) * 1e3
    kappa = rng.uniform(0.5, 0.9)
    base = 1.0 + 0.8 * np.exp(-0.9 * np.arange(size - 1))
    square = np.empty((size, size))
    square[:, 0] = kappa * pi * rng.uniform(0.3, 0.5, size)
    for j in range(size - 1):
        ratio = base[j] * np.exp(noise * rng.standard_normal(size))
        if monotone:
            ratio = np.maximum(ratio, 1.0 + 1e-4 * rng.uniform(0.5, 1.0, size))
        square[:, j + 1] = square[:, j] * ratio
    vals = np.where(observed_mask(size), square, np.nan)
    return ClaimsTriangle(vals), PremiumVector(pi)


def random_cases(n: int = N_RANDOM, **kw):
    """``n`` seeded cases with sizes cycling through 5..11."""
    return [random_case(1000 + k, 5 + k % 7, **kw) for k in range(n)]


@pytest.fixture(scope="session")
def wm():
    return load_wuthrich_merz()


@pytest.fixture(scope="session")
def cases():
    return random_cases()


@st.composite
def triangles(draw, min_size=2, max_size=8, integer=False):
    """Hypothesis strategy: positive cumulative triangles built from ratios.

    ``integer=True`` rounds cells to whole currency units.
    """
    n = draw(st.integers(min_size, max_size))
    first = draw(st.lists(st.floats(1.0, 1e7), min_size=n, max_size=n))
    ratios = draw(st.lists(st.floats(0.5, 3.0), min_size=n * (n - 1) // 2,
                           max_size=n * (n - 1) // 2))
    vals = np.full((n, n), np.nan)
    it = iter(ratios)
    for r in range(n):
        vals[r, 0] = first[r]
        for c in range(1, n - r):
            vals[r, c] = vals[r, c - 1] * next(it)
    if integer:
        vals = np.where(np.isnan(vals), vals, np.maximum(np.round(vals), 1.0))
    return ClaimsTriangle(vals)


@st.composite
def triangle_with_premiums(draw, min_size=2, max_size=8):
    tri = draw(triangles(min_size, max_size))
    pi = draw(st.lists(st.floats(1.0, 1e7), min_size=tri.I, max_size=tri.I))
    return tri, PremiumVector(pi)
