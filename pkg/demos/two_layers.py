"""
Two layers: dressed states and the double peak
==============================================

Two atomic columns exchange photons, the self-energy becomes a 2x2 matrix and
its eigenvalues Sigma+- set two resonances. Whether two maxima survive depends
on their splitting against their widths.
"""
# %%
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ccaphoton import ModelParams, Momentum2, peak_positions, r_two, sigma_matrix

OUT = Path(__file__).with_name("out")
OUT.mkdir(exist_ok=True)
deltas = np.arange(-60, 60, 0.02)

cases = [
    ("k=(pi/8,pi/4), gap 7", Momentum2(math.pi / 8, math.pi / 4), ModelParams.two_layer(7.0, 5.0, x2=7, d=3)),
    ("k=(pi/8,pi/4), gap 8", Momentum2(math.pi / 8, math.pi / 4), ModelParams.two_layer(7.0, 5.0, x2=8, d=3)),
    ("k=(pi/8,pi/3), gap 12", Momentum2(math.pi / 8, math.pi / 3), ModelParams.two_layer(5.0, 5.0, x2=12, d=3)),
    ("k=(pi/8,pi/3), gap 8", Momentum2(math.pi / 8, math.pi / 3), ModelParams.two_layer(5.0, 5.0, x2=8, d=3)),
]

# %%
fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)
for ax, (label, k, p) in zip(axes.flat, cases):
    m = sigma_matrix(k, p)
    dp, dm = peak_positions(k, p)
    vals = np.array([r_two(k, p.with_delta(x)).total for x in deltas])
    ax.plot(deltas, vals)
    for x in (dp, dm):
        ax.axvline(x, ls=":", c="k", lw=0.8)
    ax.set_title(label, fontsize=9)
    print(f"{label}: Sigma+ = {m.sigma_plus:.3f}, Sigma- = {m.sigma_minus:.3f}, "
          f"Delta+- = ({dp:.2f}, {dm:.2f})")
for ax in axes[1]:
    ax.set_xlabel(r"$\Delta$")
fig.tight_layout()
fig.savefig(OUT / "two_layers.png", dpi=120)

# %%
# Counting conventions for R_II differ once the layers break the forward/backward
# symmetry of a channel.
k = Momentum2(2.5, math.pi / 4)
p = ModelParams.two_layer(7.0, 5.0, x2=1, d=3, delta=-4.0)
for mode in ("paper", "directional", "literal"):
    print(f"{mode:12s} R_II = {r_two(k, p, mode).total:.6f}")
