"""Scattering by two atomic layers.

The two spin waves (one per layer) exchange photons through the quasi-1D
channels, which makes the self-energy a 2x2 matrix. Its eigenvalues
``Sigma_+/-`` are the complex energy shifts of the two dressed collective
states; ``R_II`` peaks near ``Delta_+/- = Re Sigma_+/- + 2 xi (cos kx + cos ky)``.

``u_II`` depends on the outgoing longitudinal momentum through the layer
phases, so the forward and backward packets of a channel generally carry
different weights. :func:`r_two` exposes three ways of counting them:

``"paper"``
    every channel weighted by ``u_II`` at ``+k_lx``, counted as in the
    single-layer sum ``P_0 + 2 sum_{l>=1} P_l``;
``"directional"``
    each packet weighted by ``u_II`` at its own signed momentum
    (``l = 0`` forward, ``l != 0`` along ``sign(l)``);
``"literal"``
    ``2 sum_{l=1}^{d}`` with ``u_II`` at ``+k_lx``. Since ``p_d = p_0`` this
    counts the ``l = 0`` channel twice and does not reduce to ``R_I``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergentSelfEnergyError
from .green import lattice_green_phase
from .lattice import OPEN, ModelParams, Momentum2, dispersion, fold_momentum, open_channels
from .scatter1 import ScatteringResult, _check_incident, _p_from_u, bare_crossing

__all__ = [
    "MODES",
    "DEGENERACY_TOL",
    "SelfEnergyMatrix2",
    "TwoLayerAmplitudes",
    "sigma_matrix",
    "sigma_pm",
    "beta_two",
    "beta_two_direct",
    "u_two",
    "r_two",
    "peak_positions",
]

MODES = ("paper", "directional", "literal")

DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class SelfEnergyMatrix2:
    """Two-layer self-energy matrix and its eigenvalues.

    Entries and eigenvalues are ``None`` when ``divergent``.
    """

    s11: complex | None
    s12: complex | None
    s21: complex | None
    s22: complex | None
    sigma_plus: complex | None
    sigma_minus: complex | None
    degenerate: bool
    divergent: bool

    def as_array(self) -> np.ndarray:
        if self.divergent:
            raise DivergentSelfEnergyError("self-energy matrix diverges")
        return np.array([[self.s11, self.s12], [self.s21, self.s22]], dtype=complex)


@dataclass(frozen=True)
class TwoLayerAmplitudes:
    """Layer amplitudes ``beta^(1)``, ``beta^(2)``.

    ``j1``/``j2`` are the auxiliaries of the partial-fraction form
    (``None`` when the corresponding coupling vanishes); ``fallback`` marks
    a degenerate spectrum solved by a direct linear solve instead.
    """

    beta1: complex
    beta2: complex
    j1: complex | None
    j2: complex | None
    delta_onshell: float
    fallback: bool = False

    @property
    def betas(self) -> tuple[complex, complex]:
        return (self.beta1, self.beta2)


def _eigen(s11, s12, s21, s22):
    root = cmath.sqrt((s11 - s22) ** 2 + 4.0 * s12 * s21)
    plus = 0.5 * (s11 + s22 + root)
    minus = 0.5 * (s11 + s22 - root)
    return plus, minus


def _is_degenerate(plus, minus):
    return abs(plus - minus) <= DEGENERACY_TOL * (abs(plus) + abs(minus))


def sigma_matrix(k: Momentum2, p: ModelParams) -> SelfEnergyMatrix2:
    """Self-energy matrix of two layers.

    ``Sigma_ij = Omega_i conj(Omega_j) / d * exp(-i kx (x_i - x_j))
    * sum_l G(eps_k, p_l(ky), x_i - x_j)`` with ``G`` the chain Green's
    function :func:`~ccaphoton.green.lattice_green_phase`.
    """
    if len(p.layers) != 2:
        raise ValueError("sigma_matrix needs two layers")
    energy = dispersion(k, p)
    kys = [float(fold_momentum(k.ky, l, p.d)) for l in range(p.d)]
    entries = {}
    divergent = False
    for i, li in enumerate(p.layers):
        for j, lj in enumerate(p.layers):
            pref = li.omega * lj.omega.conjugate()
            if pref == 0:
                entries[i, j] = 0j
                continue
            dx = li.x - lj.x
            gs = [lattice_green_phase(energy, ky, dx, p) for ky in kys]
            if any(g is None for g in gs):
                divergent = True
                continue
            entries[i, j] = pref / p.d * cmath.exp(-1j * k.kx * dx) * sum(gs)
    if divergent:
        return SelfEnergyMatrix2(None, None, None, None, None, None, False, True)
    s11, s12, s21, s22 = entries[0, 0], entries[0, 1], entries[1, 0], entries[1, 1]
    plus, minus = _eigen(s11, s12, s21, s22)
    return SelfEnergyMatrix2(s11, s12, s21, s22, plus, minus,
                             _is_degenerate(plus, minus), False)


def sigma_pm(m: SelfEnergyMatrix2) -> tuple[complex, complex]:
    """Eigenvalues ``(Sigma_+, Sigma_-)`` on the principal square-root branch.

    The principal root has a non-negative real part, so
    ``Re Sigma_+ >= Re Sigma_-``. Labels are not tracked continuously along
    a sweep.
    """
    if m.divergent:
        raise DivergentSelfEnergyError("self-energy matrix diverges")
    return _eigen(m.s11, m.s12, m.s21, m.s22)


def _onshell(k, p):
    return p.delta - bare_crossing(k, p)


def beta_two_direct(k: Momentum2, p: ModelParams, m: SelfEnergyMatrix2 | None = None):
    """Solve ``(Delta_k - Sigma) beta = Omega / 2pi`` as a 2x2 linear system."""
    if m is None:
        m = sigma_matrix(k, p)
    if m.divergent:
        return np.zeros(2, dtype=complex)
    rhs = np.array([l.omega for l in p.layers], dtype=complex) / (2.0 * math.pi)
    return np.linalg.solve(_onshell(k, p) * np.eye(2) - m.as_array(), rhs)


def beta_two(k: Momentum2, p: ModelParams, m: SelfEnergyMatrix2 | None = None) -> TwoLayerAmplitudes:
    """Layer amplitudes from the partial-fraction form over the dressed poles.

    ``beta^(s) = Omega_s / (2pi (S+ - S-)) [(S+ - J_s)/(D - S+) - (S- - J_s)/(D - S-)]``
    with ``J_s = Sigma_{s's'} - (Omega_{s'}/Omega_s) Sigma_{ss'}`` and
    ``D = Delta_k``. Falls back to :func:`beta_two_direct` when the two
    eigenvalues coincide.
    """
    if m is None:
        m = sigma_matrix(k, p)
    dk = _onshell(k, p)
    if m.divergent:
        return TwoLayerAmplitudes(0j, 0j, None, None, dk)
    om = [l.omega for l in p.layers]
    s = m.as_array()
    js = []
    for i in range(2):
        o = 1 - i
        js.append(None if om[i] == 0 else s[o, o] - om[o] / om[i] * s[i, o])
    if m.degenerate:
        b = beta_two_direct(k, p, m)
        return TwoLayerAmplitudes(complex(b[0]), complex(b[1]), js[0], js[1], dk, True)
    plus, minus = m.sigma_plus, m.sigma_minus
    betas = []
    for i in range(2):
        o = 1 - i

        # Omega_s (S - J_s), written without dividing by Omega_s
        def num(sig):
            return om[i] * (sig - s[o, o]) + om[o] * s[i, o]

        betas.append((num(plus) / (dk - plus) - num(minus) / (dk - minus))
                     / (2.0 * math.pi * (plus - minus)))
    return TwoLayerAmplitudes(complex(betas[0]), complex(betas[1]), js[0], js[1], dk)


def u_two(k: Momentum2, kx_out: float, p: ModelParams,
          amps: TwoLayerAmplitudes | None = None) -> complex:
    """T-matrix weight ``(1/d) sum_s exp(-i (kx_out - kx) x_s) conj(Omega_s) beta^(s)``.

    With one coupling switched off this is :func:`~ccaphoton.scatter1.u_one`
    up to a phase.
    """
    if amps is None:
        amps = beta_two(k, p)
    total = 0j
    for layer, beta in zip(p.layers, amps.betas):
        total += cmath.exp(-1j * (kx_out - k.kx) * layer.x) * layer.omega.conjugate() * beta
    return total / p.d


def r_two(k0: Momentum2, p: ModelParams, mode: str = "paper") -> ScatteringResult:
    """Two-layer scattering probability ``R_II`` (see module docstring for ``mode``)."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    _check_incident(k0)
    m = sigma_matrix(k0, p)
    chans = open_channels(k0, p)
    if m.divergent:
        return ScatteringResult(tuple((ch, 0.0) for ch in chans), 0.0,
                                math.nan, math.nan, True, None)
    amps = beta_two(k0, p, m)
    pm = (m.sigma_plus, m.sigma_minus)

    def prob(ch, kx_out):
        return _p_from_u(u_two(k0, kx_out, p, amps) if ch.status == OPEN else 0j,
                         k0, ch, p.xi)

    if mode == "literal":
        # l = 1..d, channel d folds back onto l = 0
        probs = []
        for l in range(1, p.d + 1):
            ch = chans[(l % p.d) + p.d - 1]
            probs.append((ch, 2.0 * prob(ch, ch.klx) if ch.is_open else prob(ch, 0.0)))
        total = math.fsum(pr for _, pr in probs)
        return ScatteringResult(tuple(probs), total, math.nan, math.nan, False, pm)

    probs = []
    for ch in chans:
        if not ch.is_open:
            probs.append((ch, prob(ch, 0.0)))
        elif mode == "paper":
            probs.append((ch, prob(ch, ch.klx)))
        else:
            probs.append((ch, prob(ch, k0.kx if ch.l == 0 else ch.signed_klx)))
    total = math.fsum(pr for _, pr in probs)
    return ScatteringResult(tuple(probs), total, math.nan, math.nan, False, pm)


def peak_positions(k: Momentum2, p: ModelParams) -> tuple[float, float]:
    """Expected double-peak detunings ``(Delta_+, Delta_-)``."""
    m = sigma_matrix(k, p)
    plus, minus = sigma_pm(m)
    base = bare_crossing(k, p)
    return (base + plus.real, base + minus.real)
