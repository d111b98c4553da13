"""Bloch band structure of the periodically continued harmonic well.

For a cell that is symmetric about its centre, the one-period monodromy
matrix has half-trace

    D(eps) = phi_e(alpha) phi_o'(alpha) + phi_e'(alpha) phi_o(alpha)

and Bloch states with ``cos(k d) = D(eps)`` exist exactly where ``|D| <= 1``.
With the Wronskian equal to one the band-edge conditions factor,

    D - 1 = 2 phi_e'(alpha) phi_o(alpha),    D + 1 = 2 phi_e(alpha) phi_o'(alpha),

so every band edge is a simple zero of one of the four edge values. Each
factor is scanned for sign changes separately, which keeps exponentially
narrow deep-well bands resolvable even though ``|D| - 1`` itself hardly
dips below zero there.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from types import SimpleNamespace

import numpy as np

from . import cells
from .errors import NumericalError, ValidationError
from .model import ModelParams

SCAN_STEP = 0.01
EDGE_XTOL = 1e-13
MAX_REFINE = 6

# names of the four edge factors, in edge_values order
EDGE_KINDS = ("even-node", "even-flat", "odd-node", "odd-flat")

HARMONIC = SimpleNamespace(edge_values=cells.edge_values, solve_cell=cells.solve_cell)


@dataclass(frozen=True)
class DispersionSample:
    eps: float
    half_trace: float

    @property
    def allowed(self):
        return abs(self.half_trace) <= 1.0


@dataclass(frozen=True)
class Band:
    """One allowed band. ``samples`` holds ``(k*d, eps)`` pairs on ``[0, pi]``.

    ``lo_kind``/``hi_kind`` say which edge condition holds at each end
    (``*-node``: wavefunction vanishes at the cell boundary). ``resolved`` is
    False when the band is narrower than double precision can separate.
    """

    index: int
    eps_lo: float
    eps_hi: float
    lo_kind: str = ""
    hi_kind: str = ""
    resolved: bool = True
    samples: tuple = field(default=(), repr=False)

    @property
    def width(self):
        return self.eps_hi - self.eps_lo

    @property
    def center(self):
        return 0.5 * (self.eps_lo + self.eps_hi)

    @property
    def k0_at_lo(self):
        """True if ``k*d = 0`` sits at the lower edge (band rises with k)."""
        return self.lo_kind in ("even-flat", "odd-node")


def _cell(cell):
    return HARMONIC if cell is None else cell


def half_trace_values(alpha, eps, cell=None):
    e, ep, o, op = _cell(cell).edge_values(np.atleast_1d(eps), alpha)
    return e * op + ep * o


def half_trace(params: ModelParams, eps: float, cell=None) -> DispersionSample:
    """Solvability function ``D(eps)``; equals ``cos(k d)`` inside a band."""
    eps = float(eps)
    if not math.isfinite(eps):
        raise ValidationError("eps", f"must be finite, got {eps}")
    return DispersionSample(eps, float(half_trace_values(params.alpha, eps, cell)[0]))


def bracket_roots(func, lo, hi, flo=None, fhi=None, xtol=None, maxiter=200):
    """Vectorized Illinois regula falsi with a bisection safeguard.

    ``func(x, idx)`` evaluates the ``idx``-th problems at abscissae ``x``;
    every ``[lo[i], hi[i]]`` must bracket a sign change.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    if lo.size == 0:
        return lo
    if xtol is None:
        xtol = EDGE_XTOL
    every = np.arange(lo.size)
    flo = func(lo, every) if flo is None else np.array(flo, dtype=float)
    fhi = func(hi, every) if fhi is None else np.array(fhi, dtype=float)
    if np.any(np.sign(flo) * np.sign(fhi) > 0):
        raise NumericalError("bracket_roots: interval does not bracket a root")
    x = np.where(flo == 0, lo, np.where(fhi == 0, hi, 0.5 * (lo + hi)))
    done = (flo == 0) | (fhi == 0)
    side = np.zeros(lo.shape, dtype=int)
    for it in range(maxiter):
        active = ~done
        if not active.any():
            break
        a, b, fa, fb = lo[active], hi[active], flo[active], fhi[active]
        if it % 4 == 3:
            xn = 0.5 * (a + b)
        else:
            with np.errstate(invalid="ignore", divide="ignore"):
                xn = (a * fb - b * fa) / (fb - fa)
            bad = ~np.isfinite(xn) | (xn <= np.minimum(a, b)) | (xn >= np.maximum(a, b))
            xn = np.where(bad, 0.5 * (a + b), xn)
        fn = func(xn, np.flatnonzero(active))
        same_lo = np.sign(fn) == np.sign(fa)
        sd = side[active]
        # Illinois: halve the stale endpoint value when it survives twice
        na, nb = np.where(same_lo, xn, a), np.where(same_lo, b, xn)
        nfa = np.where(same_lo, fn, np.where(sd == -1, 0.5 * fa, fa))
        nfb = np.where(same_lo, np.where(sd == 1, 0.5 * fb, fb), fn)
        side[active] = np.where(same_lo, 1, -1)
        lo[active], hi[active], flo[active], fhi[active] = na, nb, nfa, nfb
        x[active] = xn
        tol = xtol * np.maximum(1.0, np.abs(xn))
        fin = (fn == 0) | (np.abs(nb - na) <= tol)
        done[np.flatnonzero(active)[fin]] = True
    else:
        if not done.all():
            raise NumericalError("bracket_roots: no convergence")
    # prefer the bracket midpoint once the bracket itself has collapsed
    collapsed = np.abs(hi - lo) <= xtol * np.maximum(1.0, np.abs(x))
    return np.where(collapsed & (flo != 0) & (fhi != 0), 0.5 * (lo + hi), x)


def _edge_counts(alpha, eps, cell):
    """Number of zeros of each edge factor below ``eps`` (Pruefer angle count)."""
    sol = cell.solve_cell(eps, xi_max=alpha)
    q = math.sqrt(max(2.0 * abs(eps), 1.0))
    bp = sol.breakpoints
    bp = bp[bp >= 0]
    xi = np.concatenate([np.linspace(a, b, 9)[:-1] for a, b in zip(bp[:-1], bp[1:])] + [[alpha]])
    counts = []
    for which in (sol.even, sol.odd):
        v, dv = which(xi)
        theta = np.unwrap(np.arctan2(q * v, dv))
        t = theta[-1] / math.pi
        counts.append(int(math.floor(t)))          # node at edge
        counts.append(int(math.floor(t + 0.5)))    # flat at edge
    return counts


def _factor_zeros(alpha, eps_lo, eps_hi, step, cell):
    grid = np.arange(eps_lo, eps_hi + step, step)
    grid = grid[grid <= eps_hi + 1e-12]
    vals = cell.edge_values(grid, alpha)
    found = []
    for f in range(4):
        s = np.sign(vals[f])
        idx = np.flatnonzero(s[:-1] * s[1:] <= 0)
        # a grid point sitting exactly on a zero shows up twice
        idx = idx[~((s[idx + 1] == 0) & np.isin(idx + 1, idx))] if idx.size else idx
        if idx.size == 0:
            continue

        def fun(x, _, f=f):
            return cell.edge_values(x, alpha)[f]

        roots = bracket_roots(fun, grid[idx], grid[idx + 1], vals[f][idx], vals[f][idx + 1])
        found.extend((float(r), EDGE_KINDS[f]) for r in roots)
    found.sort()
    return grid[-1], found


def _scan_edges(alpha, eps_top, cell, step=SCAN_STEP):
    """All band edges below ``eps_top`` with a node-count consistency check."""
    check = cell is HARMONIC
    for level in range(MAX_REFINE + 1):
        end, edges = _factor_zeros(alpha, 0.0, eps_top, step, cell)
        if not check:
            return edges
        expected = _edge_counts(alpha, end, cell)
        got = [sum(1 for e, k in edges if k == kind and e < end) for kind in EDGE_KINDS]
        if got == expected:
            return edges
        warnings.warn(f"band scan missed edges at step {step:g} (found {got}, expected {expected}); refining",
                      RuntimeWarning, stacklevel=3)
        step /= 4
    raise NumericalError(f"band edges not resolved down to scan step {step:g}")


def find_bands(params: ModelParams, eps_max: float | None = None, n_max: int | None = None,
               n_k: int = 0, cell=None) -> list:
    """Allowed bands with ``eps_lo < eps_max``, or the first ``n_max`` bands.

    Edges are located by a grid scan of the factorized ``|D| - 1`` with an
    initial step of 0.01 hbar*omega, then refined by bracketed root finding.
    ``n_k > 1`` also fills each band's ``samples`` with its dispersion.
    """
    if eps_max is None and n_max is None:
        raise ValidationError("eps_max", "give eps_max or n_max")
    if n_max is not None and n_max < 1 and eps_max is None:
        raise ValidationError("n_max", f"must be >= 1, got {n_max}")
    if eps_max is not None and eps_max <= 0:
        return []
    cell = _cell(cell)
    alpha = params.alpha
    if eps_max is not None:
        top = float(eps_max)
    else:
        # free-particle estimate of the n_max-th band top, padded
        top = max(n_max + 1.0, ((n_max + 1) * math.pi) ** 2 / (8 * alpha ** 2) + alpha ** 2 / 6 + 1.0)
    # go a little past the target so the last band's upper edge is caught
    span = top + max(1.0, 0.05 * top)
    while True:
        edges = _scan_edges(alpha, span, cell)
        bands = _pair_edges(edges)
        if eps_max is not None:
            # an odd edge count means the scan stopped inside a band; that is
            # fine once the unpaired lower edge lies above the target
            if len(edges) % 2 == 0 or edges[-1][0] >= top:
                bands = [b for b in bands if b.eps_lo < top]
                break
        elif len(bands) >= n_max:
            bands = bands[:n_max]
            break
        span *= 1.5
    if n_k > 1:
        bands = [Band(b.index, b.eps_lo, b.eps_hi, b.lo_kind, b.hi_kind, b.resolved,
                      tuple(dispersion(params, b, n_k, cell=cell))) for b in bands]
    return bands


def _pair_edges(edges):
    bands = []
    for n in range(len(edges) // 2):
        (lo, klo), (hi, khi) = edges[2 * n], edges[2 * n + 1]
        resolved = hi - lo > 4 * EDGE_XTOL * max(1.0, abs(lo))
        if not resolved:
            warnings.warn(f"band {n} narrower than double precision resolves; reported at its midpoint",
                          RuntimeWarning, stacklevel=3)
            mid = 0.5 * (lo + hi)
            lo = hi = mid
        bands.append(Band(n, lo, hi, klo, khi, resolved))
    return bands


def solve_dispersion(params: ModelParams, band: Band, k_d, cell=None):
    """Energies on ``band`` for an array of ``k*d`` values in ``[0, pi]``."""
    k_d = np.atleast_1d(np.asarray(k_d, dtype=float))
    if np.any((k_d < -1e-12) | (k_d > math.pi + 1e-12)):
        raise ValidationError("k_d", "must lie in [0, pi]")
    cell = _cell(cell)
    alpha = params.alpha
    target = np.cos(k_d)
    if not band.resolved or band.width == 0:
        return np.full(k_d.shape, band.center)
    d_lo, d_hi = half_trace_values(alpha, [band.eps_lo, band.eps_hi], cell)
    g_lo = d_lo - target
    g_hi = d_hi - target
    out = np.empty_like(k_d)
    # at the zone centre and boundary the root is an edge itself
    edge_tol = 1e-8
    at_lo = np.abs(g_lo) <= edge_tol
    at_hi = (np.abs(g_hi) <= edge_tol) & ~at_lo
    out[at_lo] = band.eps_lo
    out[at_hi] = band.eps_hi
    rest = ~(at_lo | at_hi)
    bad = rest & (np.sign(g_lo) * np.sign(g_hi) > 0)
    if bad.any():
        raise NumericalError(f"root not bracketed on band {band.index} at k*d={k_d[bad][0]!r}")
    if rest.any():
        sel = np.flatnonzero(rest)

        def fun(x, idx):
            return half_trace_values(alpha, x, cell) - target[sel[idx]]

        out[sel] = bracket_roots(fun, np.full(sel.size, band.eps_lo), np.full(sel.size, band.eps_hi),
                                 g_lo[sel], g_hi[sel])
    return out


def dispersion(params: ModelParams, band: Band, n_k: int, cell=None) -> list:
    """``(k*d, eps)`` on a uniform grid of ``n_k`` points over ``[0, pi]``."""
    if n_k < 2:
        raise ValidationError("n_k", f"must be >= 2, got {n_k}")
    kd = np.linspace(0.0, math.pi, n_k)
    eps = solve_dispersion(params, band, kd, cell=cell)
    return [(float(k), float(e)) for k, e in zip(kd, eps)]


def band_gaps(bands):
    """``(s, eps_below, eps_above)`` for the gap between band ``s-1`` and band ``s``.

    In the extended-zone picture gap ``s`` opens at ``k d = s*pi``.
    """
    return [(b1.index, b0.eps_hi, b1.eps_lo) for b0, b1 in zip(bands[:-1], bands[1:])]


def state_count(params: ModelParams, bands, eps, cell=None):
    """Integrated number of states per cell below ``eps``.

    Each band holds one state per cell; inside a band the fraction is
    ``k d / pi`` measured from the band bottom.
    """
    eps = float(eps)
    total = 0.0
    for b in bands:
        if eps >= b.eps_hi:
            total += 1.0
        elif eps > b.eps_lo:
            d = float(half_trace_values(params.alpha, eps, cell)[0])
            kd = math.acos(max(-1.0, min(1.0, d)))
            total += kd / math.pi if b.k0_at_lo else 1.0 - kd / math.pi
    return total
