"""Scattering by a single atomic layer.

The probabilities here use the normalisation of the momentum-space packet
picture: for ``d = 1`` at resonance every ``P_l`` equals ``1/(4 pi^2)``.
Multiply by :data:`FLUX_FACTOR` to obtain flux-normalised probabilities
(see :mod:`ccaphoton.oracle`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DivergentSelfEnergyError, SingularChannelError
from .green import SelfEnergy, sigma_total
from .lattice import BAND_EDGE, OPEN, Channel, ModelParams, Momentum2, open_channels

__all__ = [
    "FLUX_FACTOR",
    "SINGULAR_TOL",
    "ScatteringResult",
    "bare_crossing",
    "beta_coeff",
    "u_one",
    "p_channel",
    "r_one",
    "resonance_detuning",
]

#: Ratio between flux-normalised probabilities and the ``P_l`` reported here.
FLUX_FACTOR = 4.0 * math.pi ** 2

#: ``|sin k0x|`` below this is treated as a band-edge incident momentum.
SINGULAR_TOL = 1e-9


@dataclass(frozen=True)
class ScatteringResult:
    """Per-channel scattering probabilities for one incident momentum.

    Attributes
    ----------
    channels : tuple of (Channel, float)
        ``(channel, P_l)`` for ``l = -(d-1) .. d-1``.
    total : float
        ``R = sum_l P_l``.
    lamb_shift, linewidth : float
        ``Re Sigma`` and ``-Im Sigma`` (nan when divergent or for two layers).
    divergent : bool
    sigma_pm : tuple of complex, optional
        Dressed eigenvalues, two-layer results only.
    """

    channels: tuple
    total: float
    lamb_shift: float
    linewidth: float
    divergent: bool = False
    sigma_pm: tuple | None = None

    def probability(self, l: int) -> float:
        for ch, prob in self.channels:
            if ch.l == l:
                return prob
        raise KeyError(l)


def bare_crossing(k: Momentum2, p: ModelParams) -> float:
    """``2 xi (cos kx + cos ky)``: detuning at which the bare photon meets the atom."""
    return 2.0 * p.xi * (math.cos(k.kx) + math.cos(k.ky))


def _denominator(k, p, sigma: SelfEnergy):
    return p.delta - bare_crossing(k, p) - sigma.value


def beta_coeff(k: Momentum2, p: ModelParams) -> complex:
    """Atomic amplitude ``beta = (Omega/2pi) / (eps_k - omega_a - Sigma)``.

    Returns 0 where the self-energy diverges (the atoms decouple).
    """
    omega = p.layers[0].omega
    sigma = sigma_total(k, p)
    if omega == 0 or sigma.divergent:
        return 0j
    return omega / (2.0 * math.pi) / _denominator(k, p, sigma)


def u_one(k: Momentum2, p: ModelParams, sigma: SelfEnergy | None = None) -> complex:
    """On-shell T-matrix weight ``|Omega|^2 / (2 pi d (Delta - 2xi(cos kx + cos ky) - Sigma))``."""
    omega2 = abs(p.layers[0].omega) ** 2
    if sigma is None:
        sigma = sigma_total(k, p)
    if omega2 == 0.0 or sigma.divergent:
        return 0j
    return omega2 / (2.0 * math.pi * p.d * _denominator(k, p, sigma))


def _check_incident(k0: Momentum2):
    if abs(math.sin(k0.kx)) < SINGULAR_TOL:
        raise SingularChannelError(
            f"incident kx={k0.kx!r} sits on a band edge (sin kx = 0)")


def _p_from_u(u, k0: Momentum2, ch: Channel, xi) -> float:
    if ch.status == BAND_EDGE:
        raise SingularChannelError(f"channel l={ch.l} sits on a band edge")
    if ch.status != OPEN:
        return 0.0
    return abs(u) ** 2 / (4.0 * xi ** 2 * abs(math.sin(k0.kx) * math.sin(ch.klx)))


def p_channel(k0: Momentum2, l: int, p: ModelParams) -> float:
    """Probability ``|u_I|^2 / (4 xi^2 |sin k0x sin klx|)`` of outgoing packet ``l``.

    Evanescent channels carry no outgoing packet and give 0.

    Raises
    ------
    SingularChannelError
        If channel ``l`` or the incident momentum sits on a band edge.
    """
    _check_incident(k0)
    if not -(p.d - 1) <= l <= p.d - 1:
        raise ValueError(f"channel index must lie in [{-(p.d - 1)}, {p.d - 1}], got {l}")
    ch = open_channels(k0, p)[l + p.d - 1]
    return _p_from_u(u_one(k0, p), k0, ch, p.xi)


def r_one(k0: Momentum2, p: ModelParams) -> ScatteringResult:
    """Total scattering probability ``R_I = P_0 + 2 sum_{l>=1} P_l``.

    At a divergent self-energy every ``P_l`` is 0 (the photon passes
    unscattered), which is reported with ``divergent=True``.
    """
    _check_incident(k0)
    sigma = sigma_total(k0, p)
    chans = open_channels(k0, p)
    if sigma.divergent:
        return ScatteringResult(tuple((ch, 0.0) for ch in chans), 0.0,
                                math.nan, math.nan, True)
    u = u_one(k0, p, sigma)
    probs = tuple((ch, _p_from_u(u, k0, ch, p.xi)) for ch in chans)
    return ScatteringResult(probs, math.fsum(pr for _, pr in probs),
                            sigma.lamb_shift, sigma.linewidth, False)


def resonance_detuning(k: Momentum2, p: ModelParams) -> float:
    """Detuning ``2 xi (cos kx + cos ky) + Re Sigma`` that maximises ``R_I``.

    Raises
    ------
    DivergentSelfEnergyError
    """
    sigma = sigma_total(k, p)
    if sigma.divergent:
        raise DivergentSelfEnergyError(f"self-energy diverges at {k}")
    return bare_crossing(k, p) + sigma.value.real
