# ---
# jupyter:
#   jupytext:
#     formats: ipynb,py:light
#     text_representation:
#       extension: .py
#       format_name: light
# ---

# # From bars to a band signature
#
# Real limit-band data is not bundled, so we build bar series from the
# model itself: sample log prices from a Bloch density, write them as CSV,
# read them back, and estimate windowed volatility.

# +
import io
from datetime import datetime, timedelta, timezone

import numpy as np

import limitbands as lb

params = lb.make_params(0.10, 2.55)
bands = lb.find_bands(params, eps_max=2 * params.alpha ** 2)
rng = np.random.default_rng(7)
t0 = datetime(2024, 3, 1, 9, 30, tzinfo=timezone(timedelta(hours=8)))
# -

# Each window draws from one Bloch state; window volume is a monotone
# stand-in for the state's energy.

bars = []
i = 0
states = [lb.bloch_state(params, b, kd) for b in bands for kd in np.linspace(0, np.pi, 8)]
for st in states:
    u = st.sample(400, rng)
    for x in u:
        c = float(np.round(100 * np.exp(x * params.d_log), 6))
        bars.append(lb.Bar(t0 + timedelta(minutes=i), c, c, c, c, float(np.round(10 * st.eps, 6))))
        i += 1

text = lb.format_bars(bars)
pts = lb.realized_volvol(lb.parse_bars(io.StringIO(text)), window=400)
for p, st in list(zip(pts, states))[::9]:
    print(f"eps {st.eps:7.3f}  model sigma2 {st.sigma2:.4f}  sampled {p.sigma2 / params.d_log ** 2:.4f}")

report = lb.band_signature_scan(pts)
print("global rank correlation", round(report.global_corr, 3), "band_like", report.band_like)
print("clusters with falling volatility:", sum(c.corr is not None and c.corr < 0 for c in report.clusters))

# A smooth monotone relation has no band signature.

print(lb.band_signature_scan([(v, 0.01 * v) for v in range(1, 60)]).band_like)
