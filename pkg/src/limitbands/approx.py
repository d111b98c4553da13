"""Analytic limits of the band structure.

Deep in the wells (``eps << alpha**2``) the bands are narrow broadenings of
the oscillator levels ``n + 1/2`` (tight binding). High above the crossover
(``eps >> alpha**2``) the cell potential is a weak perturbation of a free
particle and gaps of ``2|k_s|`` open at the zone boundaries ``k d = s*pi``
(nearly-free electron).

Energies are in units of ``hbar*omega`` and positions in ``xi = beta*x``; the
cell is ``|xi| <= alpha`` and the period is ``2*alpha``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import ValidationError
from .model import ModelParams

TB_CELLS = 6
DEGENERACY_GUARD = 1e-3


def hermite_function(n, xi):
    """Normalized oscillator eigenfunction ``psi_n(xi)``, ``int psi_n^2 dxi = 1``.

    Uses the three-term recurrence, which stays finite where ``H_n`` times
    the Gaussian would overflow.
    """
    xi = np.asarray(xi, dtype=float)
    p0 = np.pi ** -0.25 * np.exp(-0.5 * xi * xi)
    if n == 0:
        return p0
    p1 = math.sqrt(2.0) * xi * p0
    for k in range(1, n):
        p0, p1 = p1, math.sqrt(2.0 / (k + 1)) * xi * p1 - math.sqrt(k / (k + 1)) * p0
    return p1


def periodic_potential(params: ModelParams, xi):
    """Periodic continuation of the cell well, ``(xi - 2 alpha s)^2 / 2`` on cell ``s``."""
    xi = np.asarray(xi, dtype=float)
    period = 2.0 * params.alpha
    r = xi - period * np.round(xi / period)
    return 0.5 * r * r


def potential_excess(params: ModelParams, xi):
    """``V - U``: the single well minus its periodic continuation (zero on the home cell)."""
    xi = np.asarray(xi, dtype=float)
    return 0.5 * xi * xi - periodic_potential(params, xi)


@dataclass(frozen=True)
class TightBindingBand:
    """Nearest-neighbour tight-binding band of oscillator level ``n``.

    ``j0`` and ``j1`` are the magnitudes ``|J(0)|`` and ``|J(+1)|``; the signed
    overlaps are kept in ``j_plus1`` and ``j_minus1``.
    """

    n: int
    e_n: float
    j0: float
    j1: float
    j_plus1: float
    j_minus1: float
    in_regime: bool
    tail_bound: float

    @property
    def center(self):
        return self.e_n - self.j0

    @property
    def width(self):
        return 4.0 * self.j1

    def energy(self, k_d):
        """``center - 2 J(+1) cos(k d)``.

        The sign of ``J(+1)`` fixes whether the band bottom sits at the zone
        centre or at the zone boundary.
        """
        return self.center - 2.0 * self.j_plus1 * np.cos(k_d)


def overlap_integral(params: ModelParams, n: int, s: int):
    """``J(s) = int psi_n(xi - 2 alpha s) (V - U)(xi) psi_n(xi) dxi``.

    Returns ``(value, tail_bound)``. The integral runs over
    ``|xi| <= (|s| + 6) * 2 alpha`` split at the cell boundaries where
    ``V - U`` has kinks.
    """
    if n < 0:
        raise ValidationError("n", f"must be >= 0, got {n}")
    alpha = params.alpha
    shift = 2.0 * alpha * s
    reach = (abs(s) + TB_CELLS) * 2.0 * alpha

    def f(x):
        return float(hermite_function(n, x - shift) * potential_excess(params, x) * hermite_function(n, x))

    m = int(math.ceil(reach / (2 * alpha)))
    edges = [(2 * j + 1) * alpha for j in range(-m - 1, m + 1)]
    pts = [-reach] + [e for e in edges if -reach < e < reach] + [reach]
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        if b <= -alpha or a >= alpha:
            val, _ = integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-12, limit=200)
            total += val
    # next cell out on either side bounds the truncated tail
    tail = sum(abs(integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-6)[0])
               for a, b in ((reach, reach + 2 * alpha), (-reach - 2 * alpha, -reach)))
    return total, tail


def tight_binding_band(params: ModelParams, n: int) -> TightBindingBand:
    """Tight-binding estimate for the band grown from oscillator level ``n``."""
    if n < 0:
        raise ValidationError("n", f"must be >= 0, got {n}")
    e_n = n + 0.5
    in_regime = e_n <= params.alpha ** 2
    if not in_regime:
        warnings.warn(f"level n={n} lies above alpha^2={params.alpha ** 2:g}: outside tight-binding regime",
                      RuntimeWarning, stacklevel=2)
    j0, t0 = overlap_integral(params, n, 0)
    j1, t1 = overlap_integral(params, n, 1)
    jm1, tm1 = overlap_integral(params, n, -1)
    return TightBindingBand(n=n, e_n=e_n, j0=abs(j0), j1=abs(j1), j_plus1=j1, j_minus1=jm1,
                            in_regime=in_regime, tail_bound=max(t0, t1, tm1))


def tight_binding_wavefunction(params: ModelParams, n: int, k_d: float, xi, s_max: int = 8):
    """Bloch sum ``sum_s exp(i s k d) psi_n(xi - 2 alpha s)`` over ``|s| <= s_max`` (unnormalized)."""
    xi = np.asarray(xi, dtype=float)
    out = np.zeros(xi.shape, dtype=complex)
    for s in range(-s_max, s_max + 1):
        out += np.exp(1j * s * k_d) * hermite_function(n, xi - 2.0 * params.alpha * s)
    return out


@dataclass(frozen=True)
class FourierCoefficient:
    s: int
    k_s: complex


def _k_closed(alpha, s):
    if s == 0:
        return alpha * alpha / 6.0
    return (-1.0) ** (s % 2) * alpha * alpha / (math.pi ** 2 * s * s)


def mean_potential(params: ModelParams) -> float:
    """Cell average of the well, ``m omega^2 d^2 / 24 = alpha^2 / 6``."""
    return _k_closed(params.alpha, 0)


def fourier_coefficients(params: ModelParams, s_max: int) -> list:
    """Fourier coefficients ``k_s`` of the periodic well for ``s = 1..s_max``.

    Computed by oscillatory quadrature over one cell; the well is real and
    even, so ``k_{-s} = k_s`` and every coefficient is real.
    """
    if s_max < 1:
        raise ValidationError("s_max", f"must be >= 1, got {s_max}")
    alpha = params.alpha
    out = []
    for s in range(1, s_max + 1):
        # (1/2a) int_{-a}^{a} xi^2/2 cos(pi s xi / a) dxi, even integrand
        val, _ = integrate.quad(lambda x: 0.5 * x * x, 0.0, alpha, weight="cos",
                                wvar=math.pi * s / alpha, epsabs=0.0, epsrel=1e-13)
        out.append(FourierCoefficient(s, complex(val / alpha)))
    return out


def free_energy(params: ModelParams, k_ext):
    """Zeroth order, ``(k d)^2 / (8 alpha^2) + mean potential``, extended zone."""
    k_ext = np.asarray(k_ext, dtype=float)
    return k_ext ** 2 / (8.0 * params.alpha ** 2) + mean_potential(params)


def extended_k(band_index: int, k_d):
    """Map reduced ``k d`` in ``[0, pi]`` on band ``n`` to the extended zone."""
    n = band_index
    k_d = np.asarray(k_d, dtype=float)
    return n * math.pi + k_d if n % 2 == 0 else (n + 1) * math.pi - k_d


def free_electron_correction(params: ModelParams, k_d: float, s_max: int = 50):
    """Second-order nearly-free-electron energy at extended-zone ``k d``.

    Returns ``(eps0, eps2, tail)`` where ``tail`` estimates the part of the
    series beyond ``|s| = s_max``. Raises near the zone boundaries
    ``k d = s*pi`` (``s != 0``), where the expansion is degenerate; use
    :func:`gap_at_boundary` there.
    """
    if s_max < 1:
        raise ValidationError("s_max", f"must be >= 1, got {s_max}")
    k_d = float(k_d)
    near = round(k_d / math.pi)
    if near != 0 and abs(k_d - near * math.pi) < DEGENERACY_GUARD:
        raise ValidationError("k_d", f"k*d={k_d} is within {DEGENERACY_GUARD} of the zone boundary "
                                     f"{near}*pi; use gap_at_boundary({abs(near)})")
    alpha = params.alpha
    s = np.concatenate([np.arange(-s_max, 0), np.arange(1, s_max + 1)])
    ks = alpha * alpha / (np.pi ** 2 * s.astype(float) ** 2)
    denom = (k_d ** 2 - (k_d + 2 * np.pi * s) ** 2) / (8.0 * alpha ** 2)
    eps2 = float(np.sum(ks ** 2 / denom))
    eps0 = float(free_energy(params, k_d))
    # |s| > S terms ~ -(2 alpha^6 / pi^6) / s^6 each, both signs of s
    tail = 2.0 * (2.0 * alpha ** 6 / math.pi ** 6) / (5.0 * s_max ** 5)
    return eps0, eps2, tail


def gap_at_boundary(params: ModelParams, s: int) -> float:
    """First-order gap ``2|k_s| = 2 alpha^2 / (pi^2 s^2)`` at ``k d = s*pi``."""
    if s < 1:
        raise ValidationError("s", f"must be >= 1, got {s}")
    return 2.0 * abs(_k_closed(params.alpha, s))
