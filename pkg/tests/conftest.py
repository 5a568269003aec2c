"""Shared, cached surface builders for the test-suite."""
import sys
from functools import lru_cache

import numpy as np
import pytest

from lieapp import catalog as cat
from lieapp import conserved as cq
from lieapp import gauge as ga
from lieapp import legendre as lg

LW_FIXTURES = {
    "catenoid": {},
    "torus": {"R": 2.0, "r": 1.0},
    "pseudosphere": {},
    "unduloid": {"H0": 0.5, "neck": 0.5},
    "cylinder": {"r": 1.0},
}


@lru_cache(maxsize=None)
def _build(name, n, params=()):
    chart = cat.catalog(name, dict(params))
    g = cat.sample(chart, n, n)
    L = lg.lift_euclidean(g)
    a, b, c = chart.lw
    eta = ga.middle_potential_lw(L, a, b, c)
    p, q = cq.lw_conserved_pair(L, a, b, c)
    return dict(chart=chart, grid=g, L=L, eta=eta, p=p, q=q, abc=(a, b, c))


def build(name, n=32, **params):
    """Grid, lift, middle potential and conserved pair of a catalog fixture (cached)."""
    params = {**LW_FIXTURES.get(name, {}), **params}
    return _build(name, n, tuple(sorted(params.items())))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for num in sorted(lines):
            terminalreporter.write_line(lines[num])
