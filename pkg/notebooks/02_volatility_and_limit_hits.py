# ---
# jupyter:
#   jupytext:
#     formats: ipynb,py:light
#     text_representation:
#       extension: .py
#       format_name: light
# ---

# # Volatility and limit hits from Bloch states
#
# Each Bloch state gives a density for the position $u = x/d$ of the log
# price inside the limit band. Its variance is the volatility (units of
# $d^2$) and the density at $u = 1/2$ times $d$ measures how often the
# price sits on the limit.

# +
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import limitbands as lb

FIG = Path(__file__).resolve().parent / "figures"
FIG.mkdir(exist_ok=True)
params = lb.make_params(0.10, 2.55)
bands = lb.find_bands(params, eps_max=4 * params.alpha ** 2)
# -

table = np.array(lb.observable_table(params, bands, 48))
eps, s2, pl, band = table[:, 0], table[:, 1], table[:, 2], table[:, 3].astype(int)

fig, (a1, a2) = plt.subplots(1, 2, figsize=(9, 3.5))
for n in np.unique(band):
    m = band == n
    a1.plot(eps[m], s2[m], ".", ms=3)
    a2.plot(eps[m], pl[m], ".", ms=3)
x = np.linspace(0, eps.max(), 50)
a1.plot(x, lb.harmonic_sigma2(params, x), "k--", lw=0.8, label="unbounded oscillator")
a1.axhline(1 / 12, c="0.5", lw=0.8, label="uniform, 1/12")
a1.set(xlabel=r"$\varepsilon$", ylabel=r"$\sigma^2$ [$d^2$]", ylim=(0, 0.12))
a1.legend(fontsize=8)
a2.set(xlabel=r"$\varepsilon$", ylabel="p_limit")
fig.savefig(FIG / "observables.png", dpi=120, bbox_inches="tight")

# Inside a band volatility falls as energy rises, while between bands it
# rises. The band average approaches 1/12 from above far above the wells.

for n in np.unique(band):
    m = band == n
    r = np.corrcoef(eps[m], s2[m])[0, 1]
    print(f"band {n:2d}: mean sigma2*12 = {12 * s2[m].mean():.3f}, intra-band r = {r:+.2f}")

# One edge of every band is nodal: the density vanishes exactly at the limit.

b = bands[3]
u = np.linspace(-0.5, 0.5, 401)
fig, ax = plt.subplots(figsize=(5, 3))
for kd in (0.0, np.pi / 2, np.pi):
    st = lb.bloch_state(params, b, kd)
    ax.plot(u, st.density(u), label=f"kd={kd:.2f}, p_limit={st.p_limit:.2g}")
ax.set(xlabel="u = x/d", ylabel="density")
ax.legend(fontsize=8)
fig.savefig(FIG / "densities.png", dpi=120, bbox_inches="tight")
