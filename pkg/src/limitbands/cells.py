"""Fundamental solutions of the in-cell Schroedinger equation.

Inside one cell the wavefunction obeys

    phi''(xi) + (2*eps - xi**2) * phi(xi) = 0,

i.e. ``phi = exp(-xi**2/2) * H(xi)`` with ``H`` a solution of the Hermite
equation ``H'' - 2 xi H' + (2 eps - 1) H = 0``. We carry the two solutions
fixed by their data at the origin,

    even:  phi_e(0) = 1, phi_e'(0) = 0
    odd:   phi_o(0) = 0, phi_o'(0) = 1

whose Wronskian is identically one.

Evaluation is by power series. Around ``xi = 0`` the series is the Hermite
series with the Gaussian factor folded in; a single expansion about the
origin loses digits to cancellation once ``sqrt(2 eps) * xi`` is more than a
few units, so the series is re-expanded on a uniform panel grid, each panel
short enough that its scaled Taylor coefficients decay factorially. The
result is a piecewise polynomial accurate to a few ulps of the solution
scale, and every panel is independent of ``eps`` except through the
recurrence, which lets whole energy grids be propagated at once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ValidationError

#: default half-width of the domain a :class:`CellSolution` covers
DEFAULT_XI_MAX = 8.0
#: number of Taylor terms kept per panel
N_TERMS = 26
#: panel length is chosen so that ``h**2 * (2|eps| + xi_max**2 + 1) <= PANEL_SCALE**2``
PANEL_SCALE = 0.8
MAX_PANEL = 0.5
DEFAULT_RTOL = 1e-10


def _panel_count(eps_abs_max, xi_max):
    rate = math.sqrt(2.0 * eps_abs_max + xi_max * xi_max + 1.0)
    h = min(MAX_PANEL, PANEL_SCALE / rate)
    return max(1, math.ceil(xi_max / h - 1e-12))


def _panel_basis(eps, h, n_panels, n_terms=N_TERMS):
    """Scaled Taylor coefficients of the two unit solutions on every panel.

    Returns an array ``d`` of shape ``(m, n_panels, 2, n_terms)`` such that on
    panel ``i`` (left end ``xi0 = i*h``) the solution started from
    ``(phi, phi') = (1, 0)`` (basis 0) or ``(0, 1)`` (basis 1) equals
    ``sum_j d[..., j] * tau**j`` with ``tau = (xi - xi0)/h``.
    """
    eps = np.asarray(eps, dtype=float).reshape(-1, 1)
    xi0 = (np.arange(n_panels) * h).reshape(1, -1)
    a = (xi0 * xi0 - 2.0 * eps) * h * h  # (m, S)
    b = 2.0 * xi0 * h ** 3
    c = h ** 4
    m = eps.shape[0]
    d = np.zeros((m, n_panels, 2, n_terms))
    d[:, :, 0, 0] = 1.0
    d[:, :, 1, 1] = h
    a = a[..., None]
    b = np.broadcast_to(b, a.shape[:2])[..., None]
    for j in range(n_terms - 2):
        acc = a * d[..., j]
        if j >= 1:
            acc = acc + b * d[..., j - 1]
        if j >= 2:
            acc = acc + c * d[..., j - 2]
        d[..., j + 2] = acc / ((j + 1) * (j + 2))
    return d


def _panel_ends(d, h):
    """Value and derivative of each basis solution at the right panel end."""
    j = np.arange(d.shape[-1])
    val = d.sum(axis=-1)
    der = (d * j).sum(axis=-1) / h
    return val, der  # each (m, S, 2)


def _propagate(eps, xi_max, n_panels=None):
    """Panel coefficients and left-end states of phi_e and phi_o.

    Returns ``(h, coef, states)`` with ``coef`` of shape ``(m, S, 2, N)``
    holding the even (index 0) and odd (index 1) solutions' panel series and
    ``states`` of shape ``(m, S+1, 2, 2)``: ``states[:, i, s] = (phi, phi')``
    of solution ``s`` at ``xi = i*h``.
    """
    eps = np.atleast_1d(np.asarray(eps, dtype=float))
    if n_panels is None:
        n_panels = _panel_count(float(np.max(np.abs(eps))), xi_max)
    h = xi_max / n_panels
    basis = _panel_basis(eps, h, n_panels)
    val, der = _panel_ends(basis, h)
    # transfer[m, i] maps (phi, phi') at panel start to panel end
    transfer = np.stack([val, der], axis=-2)  # (m, S, 2[row], 2[basis])
    m = eps.shape[0]
    states = np.empty((m, n_panels + 1, 2, 2))
    states[:, 0, 0] = (1.0, 0.0)
    states[:, 0, 1] = (0.0, 1.0)
    for i in range(n_panels):
        states[:, i + 1] = np.einsum("mrb,msb->msr", transfer[:, i], states[:, i])
    coef = np.einsum("msb,mbj->msj", states[:, :-1].reshape(m * n_panels, 2, 2),
                     basis.reshape(m * n_panels, 2, -1)).reshape(m, n_panels, 2, -1)
    return h, coef, states


def edge_values(eps, alpha):
    """``(phi_e, phi_e', phi_o, phi_o')`` at ``xi = alpha`` for an array of energies.

    Fully vectorized; this is the workhorse of the band search.
    """
    eps = np.atleast_1d(np.asarray(eps, dtype=float))
    if not np.all(np.isfinite(eps)):
        raise ValidationError("eps", "energies must be finite")
    alpha = float(alpha)
    out = np.empty((4, eps.size))
    # panel count depends on the largest |eps|; sort so chunks stay homogeneous
    order = np.argsort(np.abs(eps), kind="stable")
    chunk = 512
    for lo in range(0, eps.size, chunk):
        idx = order[lo:lo + chunk]
        _, _, states = _propagate(eps[idx], alpha)
        end = states[:, -1]
        out[0, idx] = end[:, 0, 0]
        out[1, idx] = end[:, 0, 1]
        out[2, idx] = end[:, 1, 0]
        out[3, idx] = end[:, 1, 1]
    return out


@dataclass(frozen=True)
class CellSolution:
    """Even and odd fundamental solutions at a single energy.

    Built as a piecewise polynomial on ``[0, xi_max]``; negative arguments
    follow from parity. ``breakpoints`` lists panel boundaries on
    ``[-xi_max, xi_max]`` for callers that integrate the solutions.
    """

    eps: float
    xi_max: float
    h: float
    coef: np.ndarray = field(repr=False)

    @property
    def n_panels(self):
        return self.coef.shape[0]

    @property
    def breakpoints(self):
        pos = np.arange(self.n_panels + 1) * self.h
        pos[-1] = self.xi_max
        return np.concatenate([-pos[:0:-1], pos])

    def _eval(self, which, xi):
        xi = np.asarray(xi, dtype=float)
        ax = np.abs(xi)
        if np.any(ax > self.xi_max * (1 + 1e-12)):
            raise DomainError(f"|xi| <= {self.xi_max} required, got max {ax.max()}")
        idx = np.minimum((ax / self.h).astype(int), self.n_panels - 1)
        tau = ax / self.h - idx
        c = self.coef[idx, which]  # (..., N)
        val = np.zeros_like(tau)
        der = np.zeros_like(tau)
        for j in range(c.shape[-1] - 1, 0, -1):
            val = val * tau + c[..., j]
            der = der * tau + j * c[..., j]
        val = val * tau + c[..., 0]
        der = der / self.h
        sign = np.where(xi < 0, -1.0, 1.0)
        if which == 0:
            return val, der * sign
        return val * sign, der

    def even(self, xi):
        """``(phi_e, phi_e')`` at ``xi``."""
        return self._eval(0, xi)

    def odd(self, xi):
        """``(phi_o, phi_o')`` at ``xi``."""
        return self._eval(1, xi)

    def wronskian(self, xi):
        e, ep = self.even(xi)
        o, op = self.odd(xi)
        return e * op - ep * o


def solve_cell(eps: float, xi_max: float = DEFAULT_XI_MAX, rtol: float = DEFAULT_RTOL) -> CellSolution:
    """Fundamental solutions at energy ``eps`` (units of hbar*omega) on ``|xi| <= xi_max``.

    ``rtol`` tightens the panel grid below its default when smaller than
    ``1e-10``; the default grid already resolves the solutions to roughly
    machine precision.
    """
    try:
        eps = float(eps)
    except (TypeError, ValueError):
        raise ValidationError("eps", f"not a number: {eps!r}") from None
    if not math.isfinite(eps):
        raise ValidationError("eps", f"must be finite, got {eps}")
    if not (xi_max > 0 and math.isfinite(xi_max)):
        raise ValidationError("xi_max", f"must be positive, got {xi_max}")
    n_panels = _panel_count(abs(eps), xi_max)
    if rtol < DEFAULT_RTOL:
        n_panels *= 2
    h, coef, _ = _propagate(np.array([eps]), xi_max, n_panels)
    return CellSolution(eps=eps, xi_max=float(xi_max), h=h, coef=coef[0])


def eval_at_edge(sol: CellSolution, alpha: float):
    """The 4-tuple ``(phi_e, phi_e', phi_o, phi_o')`` at ``xi = alpha``."""
    if not (0 < alpha <= sol.xi_max):
        raise DomainError(f"alpha={alpha} outside validated domain (0, {sol.xi_max}]")
    e, ep = sol.even(alpha)
    o, op = sol.odd(alpha)
    return float(e), float(ep), float(o), float(op)
