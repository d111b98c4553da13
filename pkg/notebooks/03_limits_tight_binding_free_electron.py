# ---
# jupyter:
#   jupytext:
#     formats: ipynb,py:light
#     text_representation:
#       extension: .py
#       format_name: light
# ---

# # Two analytic limits
#
# Deep in the wells neighbouring oscillator orbitals barely overlap and a
# band is a cosine of width $4|J(1)|$. Far above, the cell potential is a
# weak ripple on a free particle and the gaps shrink like $1/s^2$.

# +
import warnings

import numpy as np

import limitbands as lb
from limitbands.approx import extended_k
# -

deep = lb.make_params(0.10, 3.5)
exact = lb.find_bands(deep, n_max=5)
print(" n   exact width    4|J(1)|     J(1)        J(-1)")
for b in exact:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        tb = lb.tight_binding_band(deep, b.index)
    print(f"{b.index:2d}  {b.width:.4e}  {tb.width:.4e}  {tb.j_plus1:+.4e}  {tb.j_minus1:+.4e}")

# $J(+1)$ and $J(-1)$ coincide for every level (the well is symmetric), while
# the sign of $J(1)$ alternates with parity. That sign decides whether the
# band bottom sits at $k=0$ or at the zone boundary.

params = lb.make_params(0.10, 2.55)
bands = lb.find_bands(params, eps_max=10 * params.alpha ** 2)
high = [b for b in bands if b.eps_lo > 4 * params.alpha ** 2]
for b in high[:4]:
    kd = 1.0
    e0, e2, _ = lb.free_electron_correction(params, float(extended_k(b.index, kd)))
    ex = float(lb.solve_dispersion(params, b, [kd])[0])
    print(f"band {b.index}: exact {ex:.6f}  free {e0:.6f}  second order {e0 + e2:.6f}")

# First-order gaps against exact ones. The ratio tends to one only slowly:
# the kinks at the cell edges keep the potential's Fourier series long.

for s, lo, hi in lb.band_gaps(bands):
    print(f"s={s:2d}  exact {hi - lo:.5f}  2|k_s| {lb.gap_at_boundary(params, s):.5f}  "
          f"ratio {(hi - lo) / lb.gap_at_boundary(params, s):.3f}")
