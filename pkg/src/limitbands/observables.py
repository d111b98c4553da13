"""Normalized Bloch states and the price observables built from them.

Positions are reported as ``u = x/d`` in ``[-1/2, 1/2]``, so the density is
in units of ``1/d`` and the volatility in units of ``d**2``. The limit-hit
measure is the edge density times the cell width, ``p_limit = |phi(d/2)|**2 * d``:
it is 1 for a uniform distribution and 0 when the state has a node at the
price limit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import bands as _bands
from .errors import NumericalError, ValidationError
from .model import ModelParams

# Gauss-Legendre order per panel; panels come from the cell solution and the
# integrand is a polynomial of degree < 2*N_TERMS on each of them
GL_ORDER = 26
NULL_TOL = 1e-6

_gl_x, _gl_w = np.polynomial.legendre.leggauss(GL_ORDER)


def _quad_nodes(breakpoints):
    a = breakpoints[:-1, None]
    b = breakpoints[1:, None]
    half = 0.5 * (b - a)
    x = (a + b) * 0.5 + half * _gl_x
    w = half * _gl_w
    return x.ravel(), w.ravel()


@dataclass(frozen=True)
class BlochState:
    """A Bloch state of one band, normalized over one cell.

    ``coeff_even``/``coeff_odd`` multiply the fundamental solutions so that
    ``int |phi|^2 dxi = 1`` over the cell.
    """

    band_index: int
    k_d: float
    eps: float
    coeff_even: complex
    coeff_odd: complex
    alpha: float
    mean: float
    sigma2: float
    p_limit: float
    sol: object = field(repr=False, compare=False)

    def wavefunction(self, u):
        """Complex amplitude at ``u = x/d`` (normalized in ``xi``)."""
        xi = 2.0 * self.alpha * np.asarray(u, dtype=float)
        e, _ = self.sol.even(xi)
        o, _ = self.sol.odd(xi)
        return self.coeff_even * e + self.coeff_odd * o

    def derivative(self, u):
        """``d phi / d xi`` at ``u = x/d``."""
        xi = 2.0 * self.alpha * np.asarray(u, dtype=float)
        _, ep = self.sol.even(xi)
        _, op = self.sol.odd(xi)
        return self.coeff_even * ep + self.coeff_odd * op

    def density(self, u):
        """Probability density of ``u = x/d`` (units ``1/d``)."""
        return 2.0 * self.alpha * np.abs(self.wavefunction(u)) ** 2

    def phase(self, u):
        return np.angle(self.wavefunction(u))

    def sample(self, n, rng=None, grid=4001):
        """Draw ``n`` positions ``u`` from the density by inverse-CDF lookup."""
        rng = np.random.default_rng(rng)
        u = np.linspace(-0.5, 0.5, grid)
        rho = self.density(u)
        cdf = np.concatenate([[0.0], np.cumsum(0.5 * (rho[1:] + rho[:-1]) * np.diff(u))])
        cdf /= cdf[-1]
        return np.interp(rng.random(n), cdf, u)


def _null_vector(e, ep, o, op, k_d):
    z = np.exp(-1j * k_d)
    m = np.array([[e * (1 - z), -o * (1 + z)],
                  [-ep * (1 + z), op * (1 - z)]])
    # each row yields a null vector when det = 0; the longer one carries
    # less relative rounding (at band edges the other vanishes outright)
    v1 = np.array([o * (1 + z), e * (1 - z)])
    v2 = np.array([op * (1 - z), ep * (1 + z)])
    v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
    vnorm = np.linalg.norm(v)
    mnorm = np.linalg.norm(m, 2)
    if vnorm == 0 or mnorm == 0:
        raise NumericalError(f"degenerate boundary system at k*d={k_d:.6g}")
    resid = np.linalg.norm(m @ v) / (mnorm * vnorm)
    if resid > NULL_TOL:
        raise NumericalError(f"boundary system not singular at k*d={k_d:.6g}: relative residual {resid:.3e}")
    return v[0], v[1]


def _state(params, band_index, k_d, eps, cell):
    alpha = params.alpha
    sol = cell.solve_cell(eps, xi_max=alpha)
    e, ep = sol.even(alpha)
    o, op = sol.odd(alpha)
    a, b = _null_vector(float(e), float(ep), float(o), float(op), k_d)
    x, w = _quad_nodes(sol.breakpoints)
    pe, _ = sol.even(x)
    po, _ = sol.odd(x)
    rho = np.abs(a * pe + b * po) ** 2
    norm = float(w @ rho)
    if not norm > 0:
        raise NumericalError(f"zero norm for band {band_index} at k*d={k_d}")
    rho = rho / norm
    m1 = float(w @ (x * rho)) / (2 * alpha)
    m2 = float(w @ (x * x * rho)) / (4 * alpha * alpha)
    c = 1.0 / math.sqrt(norm)
    a, b = a * c, b * c
    edge = abs(a * e + b * o) ** 2
    return BlochState(band_index=band_index, k_d=float(k_d), eps=float(eps),
                      coeff_even=complex(a), coeff_odd=complex(b), alpha=alpha,
                      mean=m1, sigma2=max(m2 - m1 * m1, 0.0), p_limit=float(2 * alpha * edge), sol=sol)


def bloch_states(params: ModelParams, band, k_d, cell=None) -> list:
    """States of ``band`` at every ``k*d`` in the array ``k_d``."""
    cell = _bands._cell(cell)
    k_d = np.atleast_1d(np.asarray(k_d, dtype=float))
    eps = _bands.solve_dispersion(params, band, k_d, cell=cell)
    return [_state(params, band.index, k, e, cell) for k, e in zip(k_d, eps)]


def bloch_state(params: ModelParams, band, k_d: float, cell=None) -> BlochState:
    """Normalized Bloch state of ``band`` at wave number ``k_d`` in ``[0, pi]``."""
    if not (0.0 <= k_d <= math.pi):
        raise ValidationError("k_d", f"must lie in [0, pi], got {k_d}")
    return bloch_states(params, band, [k_d], cell=cell)[0]


def _states_on_grid(params, bands, n_k, cell):
    if not bands:
        raise ValidationError("bands", "need at least one band")
    if n_k < 2:
        raise ValidationError("n_k", f"must be >= 2, got {n_k}")
    kd = np.linspace(0.0, math.pi, n_k)
    for band in bands:
        yield from bloch_states(params, band, kd, cell=cell)


def volatility_curve(params: ModelParams, bands, n_k: int, cell=None) -> list:
    """``(eps, sigma2, band_index, k_d)`` for every band and ``k`` grid point."""
    return [(st.eps, st.sigma2, st.band_index, st.k_d) for st in _states_on_grid(params, bands, n_k, cell)]


def limit_hit_curve(params: ModelParams, bands, n_k: int, cell=None) -> list:
    """``(eps, p_limit, band_index, k_d)`` for every band and ``k`` grid point."""
    return [(st.eps, st.p_limit, st.band_index, st.k_d) for st in _states_on_grid(params, bands, n_k, cell)]


def observable_table(params: ModelParams, bands, n_k: int, cell=None) -> list:
    """Both observables at once: ``(eps, sigma2, p_limit, band_index, k_d)``."""
    return [(st.eps, st.sigma2, st.p_limit, st.band_index, st.k_d)
            for st in _states_on_grid(params, bands, n_k, cell)]


def harmonic_sigma2(params: ModelParams, eps):
    """Volatility of the unbounded oscillator, ``E/(m omega^2)``, in units of ``d**2``."""
    return np.asarray(eps) / (4.0 * params.alpha ** 2)
