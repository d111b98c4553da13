"""Dimensionless parameters of the periodic harmonic price model.

Only two numbers matter once lengths are measured in ``1/beta`` and
energies in ``hbar*omega``:

* ``alpha`` -- cell half-width in oscillator units, ``(d/2) * sqrt(m*omega/hbar)``
* ``limit_fraction`` -- the daily price limit ``L``, which fixes the physical
  cell width ``d = ln(1+L) - ln(1-L)`` in log-price.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError

# roughly six bands below alpha**2; matches the picture of six conduction bands
DEFAULT_ALPHA = 2.55
DEFAULT_LIMIT = 0.10


@dataclass(frozen=True)
class ModelParams:
    alpha: float
    limit_fraction: float
    d_log: float

    @property
    def eps_top(self) -> float:
        return self.alpha * self.alpha


def make_params(limit_fraction: float = DEFAULT_LIMIT, alpha: float = DEFAULT_ALPHA) -> ModelParams:
    """Validate inputs and build a :class:`ModelParams`.

    >>> round(make_params(0.10, 2.0).d_log, 6)
    0.200671
    """
    try:
        L = float(limit_fraction)
    except (TypeError, ValueError):
        raise ValidationError("limit_fraction", f"not a number: {limit_fraction!r}") from None
    try:
        a = float(alpha)
    except (TypeError, ValueError):
        raise ValidationError("alpha", f"not a number: {alpha!r}") from None
    if not (0.0 < L < 1.0):
        raise ValidationError("limit_fraction", f"must lie in (0, 1), got {L}")
    if not (math.isfinite(a) and a > 0.0):
        raise ValidationError("alpha", f"must be positive and finite, got {a}")
    d_log = math.log1p(L) - math.log1p(-L)
    return ModelParams(alpha=a, limit_fraction=L, d_log=d_log)


def barrier_top(params: ModelParams) -> float:
    """Crossover energy ``m omega^2 d^2 / 4`` in units of ``hbar omega``.

    This is ``alpha**2``. The separating scale between the tight-binding
    and free-particle regimes; the actual potential maximum at the cell
    edge is half of it.
    """
    return params.alpha * params.alpha
