"""Single-photon scattering by periodic atomic layers in a 2D coupled-cavity array.

Modules
-------
lattice
    Parameters, momenta and the folded outgoing channels.
green
    Self-energies, chain Green's functions and densities of states.
scatter1, scatter2
    Scattering probabilities for one and two atomic layers.
oracle
    Exact strip solver and time-domain wave-packet propagator.
sweeps, cli
    Parameter sweeps and the ``ccaphoton`` command line.
"""
__version__ = "0.1.0"

from .errors import (CCAError, DivergentSelfEnergyError, IllConditionedError, InvalidSpecError,
                     NumericalError, OutOfBandError, QuadratureError, SingularChannelError,
                     WrapAroundError)
from .green import (SelfEnergy, detect_divergence, dos_1d, lattice_green_phase,
                    sigma_l_analytic, sigma_l_extrapolated, sigma_l_quadrature, sigma_total)
from .lattice import (Channel, LayerSpec, ModelParams, Momentum2, channel_cosine, dispersion,
                      fold_momentum, open_channels)
from .scatter1 import FLUX_FACTOR, ScatteringResult, p_channel, r_one, resonance_detuning, u_one
from .scatter2 import beta_two, peak_positions, r_two, sigma_matrix, sigma_pm, u_two

__all__ = [
    "__version__",
    "CCAError", "DivergentSelfEnergyError", "IllConditionedError", "InvalidSpecError",
    "NumericalError", "OutOfBandError", "QuadratureError", "SingularChannelError",
    "WrapAroundError",
    "SelfEnergy", "detect_divergence", "dos_1d", "lattice_green_phase", "sigma_l_analytic",
    "sigma_l_extrapolated", "sigma_l_quadrature", "sigma_total",
    "Channel", "LayerSpec", "ModelParams", "Momentum2", "channel_cosine", "dispersion",
    "fold_momentum", "open_channels",
    "FLUX_FACTOR", "ScatteringResult", "p_channel", "r_one", "resonance_detuning", "u_one",
    "beta_two", "peak_positions", "r_two", "sigma_matrix", "sigma_pm", "u_two",
]
