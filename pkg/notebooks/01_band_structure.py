# ---
# jupyter:
#   jupytext:
#     formats: ipynb,py:light
#     text_representation:
#       extension: .py
#       format_name: light
# ---

# # Bands of a periodically continued harmonic well
#
# A price that cannot move more than a fraction $L$ per day lives on a log
# interval of width $d = \ln(1+L) - \ln(1-L)$. Put a harmonic well on that
# interval and repeat it: the oscillator levels broaden into bands. In
# oscillator units the cell is $|\xi| \le \alpha$ and energies are in
# $\hbar\omega$.

# +
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import limitbands as lb

FIG = Path(__file__).resolve().parent / "figures"
FIG.mkdir(exist_ok=True)
# -

params = lb.make_params(limit_fraction=0.10, alpha=2.55)
print(params, "barrier scale alpha^2 =", lb.barrier_top(params))

# The half-trace $D(\varepsilon)$ of the one-cell transfer matrix decides
# everything: states exist where $|D| \le 1$ and then $\cos kd = D$.

eps = np.linspace(0.01, 12, 2000)
D = lb.bands.half_trace_values(params.alpha, eps)
fig, ax = plt.subplots(figsize=(7, 3))
ax.plot(eps, np.clip(D, -3, 3))
ax.axhspan(-1, 1, color="0.9")
ax.set(xlabel=r"$\varepsilon$ [$\hbar\omega$]", ylabel="D (clipped)")
fig.savefig(FIG / "half_trace.png", dpi=120, bbox_inches="tight")

# Deep bands are exponentially thin, so the edges are searched on the four
# edge factors separately rather than on $|D|-1$.

bands = lb.find_bands(params, eps_max=2.5 * params.alpha ** 2)
for b in bands:
    print(f"band {b.index:2d}: [{b.eps_lo:.6f}, {b.eps_hi:.6f}]  width {b.width:.3e}  node at "
          f"{'lower' if b.lo_kind.endswith('node') else 'upper'} edge")

# Reduced-zone dispersion, one curve per band

fig, ax = plt.subplots(figsize=(4, 5))
for b in bands:
    kd, e = np.array(lb.dispersion(params, b, 65)).T
    ax.plot(kd, e, "k")
ax.axhline(params.alpha ** 2, ls="--", c="r", lw=0.8)
ax.set(xlabel="k d", ylabel=r"$\varepsilon$ [$\hbar\omega$]", xlim=(0, np.pi))
fig.savefig(FIG / "dispersion.png", dpi=120, bbox_inches="tight")

# Bands per unit energy: one state per band per cell. Deep in the wells the
# count grows linearly with energy, far above it like the square root.

grid = np.linspace(0.3, 2.5 * params.alpha ** 2, 300)
N = [lb.state_count(params, bands, x) for x in grid]
fig, ax = plt.subplots(figsize=(5, 3))
ax.plot(grid, N)
ax.set(xlabel=r"$\varepsilon$", ylabel="states per cell")
fig.savefig(FIG / "state_count.png", dpi=120, bbox_inches="tight")
