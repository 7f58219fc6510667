"""
One atomic layer: a Lorentzian whose peak does not depend on the coupling
========================================================================

An incident photon with k = (pi/8, pi/4) hits one column of atoms, one atom
every d sites along y. Sweeping the detuning gives a Lorentzian centred at the
collective Lamb-shifted resonance with width -Im Sigma.
"""
# %%
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ccaphoton import ModelParams, Momentum2, r_one, resonance_detuning, sigma_total

OUT = Path(__file__).with_name("out")
OUT.mkdir(exist_ok=True)
k = Momentum2(math.pi / 8, math.pi / 4)

# %%
# Self-energy and resonance for the three atomic densities.
for d in (1, 2, 3):
    p = ModelParams.one_layer(5.0, d=d)
    sig = sigma_total(k, p).value
    print(f"d={d}: Sigma = {sig:.6f}, resonance at Delta = {resonance_detuning(k, p):.6f}")

# %%
# R_I against Delta. For d = 1 the peak is 1/(4 pi^2) whatever Omega and xi are.
deltas = np.linspace(-40, 40, 1601)
fig, ax = plt.subplots(figsize=(6, 4))
for d in (1, 2, 3):
    p = ModelParams.one_layer(5.0, d=d)
    ax.plot(deltas, [r_one(k, p.with_delta(x)).total for x in deltas], label=f"d={d}")
ax.axhline(1 / (4 * math.pi ** 2), ls=":", c="k", lw=0.8)
ax.set_xlabel(r"$\Delta$")
ax.set_ylabel(r"$R_I$")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "single_layer.png", dpi=120)
p1 = ModelParams.one_layer(5.0)
print(f"peak (d=1): {r_one(k, p1.with_delta(resonance_detuning(k, p1))).total:.12f}, "
      f"1/(4 pi^2) = {1 / (4 * math.pi ** 2):.12f}")
