"""
Zero-scattering momenta
=======================

With d = 3 the lattice folds the outgoing transverse momentum onto three
channels. Where a closed channel sits exactly on its band edge the
self-energy diverges and the layer becomes transparent.
"""
# %%
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ccaphoton import ModelParams, Momentum2, channel_cosine, fold_momentum, r_one

OUT = Path(__file__).with_name("out")
OUT.mkdir(exist_ok=True)
ky = math.pi / 4
p = ModelParams.one_layer(5.0, d=3)

# %%
# Band-edge roots, A_l = cos kx + cos ky - cos p_l = +-1.
roots = []
for l in (1, 2):
    for side in (-1, 1):
        c = math.cos(fold_momentum(ky, l, 3)) - math.cos(ky) + side
        if abs(c) < 1:
            roots.append(c)
            print(f"l={l}: cos kx = {c:.6f}, R_I there = {r_one(Momentum2(math.acos(c), ky), p).total:.1e}")

# %%
# R_I over the whole open range of cos kx; it dips linearly to zero at each root.
cs = np.linspace(-0.995, 0.995, 2000)
vals = [r_one(Momentum2(math.acos(c), ky), p).total for c in cs]
fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(cs, vals)
for c in roots:
    ax.axvline(c, ls=":", c="k", lw=0.8)
ax.set_xlabel(r"$\cos k_x$")
ax.set_ylabel(r"$R_I$")
fig.tight_layout()
fig.savefig(OUT / "zero_scattering.png", dpi=120)

# %%
# The channel cosines at one root, for reference.
kx = math.acos(roots[0])
print("A_l:", [round(channel_cosine(Momentum2(kx, ky), l, 3), 9) for l in range(3)])
