"""Shared fixtures, including a zero-potential cell used as an exact oracle."""
import math
from dataclasses import dataclass
from types import SimpleNamespace

import numpy as np
import pytest

from limitbands import make_params


def _kappa(eps):
    return np.sqrt(2.0 * np.asarray(eps, dtype=float))


def _sinc_over(k, x):
    # sin(k x)/k, finite as k -> 0
    return x * np.sinc(k * x / np.pi)


@dataclass(frozen=True)
class FreeCell:
    eps: float
    xi_max: float

    @property
    def breakpoints(self):
        n = max(8, int(math.ceil(4 * self.xi_max * (1 + math.sqrt(2 * self.eps)))))
        return np.linspace(-self.xi_max, self.xi_max, n + 1)

    def even(self, xi):
        k = float(_kappa(self.eps))
        xi = np.asarray(xi, dtype=float)
        return np.cos(k * xi), -k * np.sin(k * xi)

    def odd(self, xi):
        k = float(_kappa(self.eps))
        xi = np.asarray(xi, dtype=float)
        return _sinc_over(k, xi), np.cos(k * xi)


def free_edge_values(eps, alpha):
    k = _kappa(eps)
    return np.array([np.cos(k * alpha), -k * np.sin(k * alpha), _sinc_over(k, alpha), np.cos(k * alpha)])


def free_solve_cell(eps, xi_max=8.0, rtol=None):
    if eps < 0:
        raise ValueError("free harness only covers eps >= 0")
    return FreeCell(float(eps), float(xi_max))


FREE = SimpleNamespace(edge_values=free_edge_values, solve_cell=free_solve_cell)


@pytest.fixture
def free_cell():
    return FREE


@pytest.fixture(scope="session")
def params():
    return make_params(0.10, 2.55)


@pytest.fixture(scope="session")
def deep_params():
    return make_params(0.10, 3.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20240617)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
