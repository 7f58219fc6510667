"""
Checking the closed forms against two independent solvers
=========================================================

The strip solver matches plane waves on the Bloch-reduced lattice; the packet
solver propagates a Gaussian wave packet in real time on a finite 2D lattice.
Both report flux probabilities, 4 pi^2 times the closed-form P_l.
"""
# %%
import math

from ccaphoton import FLUX_FACTOR, ModelParams, Momentum2, r_one, r_two, resonance_detuning
from ccaphoton.oracle import WavePacketSpec, evolve_wavepacket, flux_probabilities, solve_strip_exact

# %%
# One layer, three open channels.
k = Momentum2(2.5, math.pi / 4)
p = ModelParams.one_layer(5.0, d=3)
p = p.with_delta(resonance_detuning(k, p))
flux = flux_probabilities(solve_strip_exact(k, p))
print("closed form R_I * 4pi^2 :", FLUX_FACTOR * r_one(k, p).total)
print("strip packet total      :", flux.packet_total)
print("strip unitarity         :", flux.unitarity)

# %%
# Two layers: which counting of R_II agrees with the strip solver?
p2 = ModelParams.two_layer(7.0, 5.0, x2=1, d=3, delta=-4.0)
strip2 = flux_probabilities(solve_strip_exact(k, p2)).packet_total
for mode in ("paper", "directional", "literal"):
    print(f"{mode:12s} {FLUX_FACTOR * r_two(k, p2, mode).total:.8f}   strip {strip2:.8f}")

# %%
# Time domain, at the single-layer resonance of k = (pi/8, pi/4) with d = 3.
# Takes a minute or two.
k0 = Momentum2(math.pi / 8, math.pi / 4)
p0 = ModelParams.one_layer(5.0, d=3)
p0 = p0.with_delta(resonance_detuning(k0, p0))
ref = flux_probabilities(solve_strip_exact(k0, p0))
rep = evolve_wavepacket(WavePacketSpec(k0, lx=2048), p0, ref.scattered)
for key, val in sorted(rep.scattered.items()):
    print(key, f"packet {val:.6f}", f"strip {ref.scattered.get(key, 0.0):.6f}")
print("norm drift", rep.norm_drift, "unitarity", rep.unitarity)
