"""Brute-force validators for the closed-form scattering results.

:mod:`~ccaphoton.oracle.strip` solves the stationary problem exactly on the
Bloch-reduced strip; :mod:`~ccaphoton.oracle.packet` propagates a wave
packet in time on a finite lattice. Both report flux-normalised
probabilities, i.e. :data:`~ccaphoton.scatter1.FLUX_FACTOR` times the
``P_l`` of :mod:`ccaphoton.scatter1`.
"""
from .packet import (OracleReport, PacketState, WavePacketSpec, channel_populations,
                     default_ly, evolve_wavepacket)
from .strip import (FluxProbabilities, StripChannel, StripSolution, column_hamiltonian,
                    flux_probabilities, solve_strip_exact)

__all__ = [
    "FluxProbabilities",
    "StripChannel",
    "StripSolution",
    "column_hamiltonian",
    "flux_probabilities",
    "solve_strip_exact",
    "OracleReport",
    "PacketState",
    "WavePacketSpec",
    "channel_populations",
    "default_ly",
    "evolve_wavepacket",
]
