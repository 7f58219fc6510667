"""Self-energies and quasi-1D lattice Green's functions.

A layer of atoms with period ``d`` couples its spin wave to ``d`` quasi-1D
photon channels, so every quantity here reduces to the retarded Green's
function of a 1D tight-binding chain,

.. math:: g_n(a) = \\frac{1}{2\\pi}\\int_{-\\pi}^{\\pi} dq\\,
          \\frac{e^{iqn}}{2\\xi(\\cos q - a) + i0^+},

evaluated at the channel cosine ``a = A_l``. Closed forms are provided
together with a broadened (``+i eta``) quadrature that extrapolates to
``eta -> 0``; the quadrature is the reference the closed forms are tested
against.

Divergent values (``|A_l| = 1``) are represented by ``None`` and a flag,
never by ``inf``/``nan``.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import OutOfBandError, QuadratureError
from .lattice import (BAND_EDGE, BAND_EDGE_TOL, OPEN, LayerSpec, ModelParams,
                      Momentum2, channel_cosine, classify_cosine, dispersion,
                      fold_momentum)

__all__ = [
    "SelfEnergy",
    "DosPoint",
    "ETA_LADDER",
    "sigma_l_analytic",
    "sigma_total",
    "sigma_l_quadrature",
    "sigma_l_extrapolated",
    "eta_ladder",
    "extrapolate_to_zero",
    "dos_1d",
    "lattice_green_phase",
    "lattice_green_phase_quadrature",
    "lattice_green_phase_extrapolated",
    "detect_divergence",
]

#: Broadenings (in units of ``xi``) used for the ``eta -> 0`` extrapolation.
ETA_LADDER = (1e-2, 1e-3, 1e-4)

QUAD_TOL = 1e-10


@dataclass(frozen=True)
class SelfEnergy:
    """Single-layer self-energy ``Sigma(k) = sum_l Sigma_l(k)``.

    ``value`` is ``None`` when ``divergent``; the per-channel
    ``contributions`` hold ``None`` for each band-edge channel.
    """

    value: complex | None
    divergent: bool
    contributions: tuple

    @property
    def lamb_shift(self) -> float:
        """Collective Lamb shift ``Re Sigma`` (nan if divergent)."""
        return math.nan if self.divergent else self.value.real

    @property
    def linewidth(self) -> float:
        """``-Im Sigma`` (nan if divergent)."""
        return math.nan if self.divergent else -self.value.imag


@dataclass(frozen=True)
class DosPoint:
    """1D density of states ``|dk/dE|`` of one quasi-1D channel.

    ``rho`` is ``None`` on a band edge, where it diverges.
    """

    energy: float
    rho: float | None
    band_edge: bool = False


def _layer(p: ModelParams, layer: LayerSpec | None) -> LayerSpec:
    return p.layers[0] if layer is None else layer


def sigma_l_analytic(k: Momentum2, l: int, p: ModelParams, layer: LayerSpec | None = None):
    """Closed-form contribution of channel ``l`` to the self-energy.

    Parameters
    ----------
    k : Momentum2
        Incident momentum.
    l : int
        Channel index, ``0 <= l <= d-1``.
    p : ModelParams
    layer : LayerSpec, optional
        Defaults to the first layer of ``p``.

    Returns
    -------
    complex or None
        ``-i|Omega|^2 / (2 d xi sqrt(1 - A^2))`` inside the channel band,
        ``-sign(A) |Omega|^2 / (2 d xi sqrt(A^2 - 1))`` outside it and
        ``None`` on the band edge.
    """
    if not 0 <= l < p.d:
        raise ValueError(f"channel index must lie in [0, {p.d - 1}], got {l}")
    omega2 = abs(_layer(p, layer).omega) ** 2
    a = channel_cosine(k, l, p.d)
    status = classify_cosine(a)
    if omega2 == 0.0:
        return 0j
    if status == BAND_EDGE:
        return None
    pref = omega2 / (2.0 * p.d * p.xi)
    if status == OPEN:
        return complex(0.0, -pref / math.sqrt(1.0 - a * a))
    return complex(-math.copysign(pref, a) / math.sqrt(a * a - 1.0), 0.0)


def sigma_total(k: Momentum2, p: ModelParams, layer: LayerSpec | None = None) -> SelfEnergy:
    """Sum of :func:`sigma_l_analytic` over the ``d`` channels."""
    parts = tuple(sigma_l_analytic(k, l, p, layer) for l in range(p.d))
    if any(s is None for s in parts):
        return SelfEnergy(None, True, parts)
    return SelfEnergy(complex(sum(parts)), False, parts)


def detect_divergence(k: Momentum2, p: ModelParams, layer: LayerSpec | None = None) -> list[int]:
    """Channels ``l`` (in ``0..d-1``) whose cosine sits on a band edge.

    A vanishing coupling never diverges.
    """
    if abs(_layer(p, layer).omega) == 0.0:
        return []
    return [l for l in range(p.d)
            if abs(abs(channel_cosine(k, l, p.d)) - 1.0) <= BAND_EDGE_TOL]


# --- closed-form chain Green's function --------------------------------------

def _chain_cosine(energy, ky_out, xi):
    # energy = -2 xi (cos q + cos ky_out)  <=>  cos q = a
    return -energy / (2.0 * xi) - math.cos(ky_out)


def lattice_green_phase(energy, ky_out, dx, p: ModelParams):
    """Retarded chain Green's function between columns ``dx`` apart.

    .. math:: G = \\frac{1}{2\\pi}\\int dq\\, e^{iq\\,dx}
              [E - \\epsilon(q, k_y^{out}) + i0^+]^{-1}

    Inside the band (``cos kappa = a``, ``0 < kappa < pi``) this is
    ``-i exp(i kappa |dx|) / (2 xi sin kappa)``. Outside it
    (``cosh mu = |a|``) it is
    ``-sign(a) sign(a)**|dx| exp(-mu |dx|) / (2 xi sinh mu)``.

    Returns ``None`` on a band edge.
    """
    a = _chain_cosine(energy, ky_out, p.xi)
    n = abs(int(dx))
    status = classify_cosine(a)
    if status == BAND_EDGE:
        return None
    if status == OPEN:
        kappa = math.acos(a)
        return -1j * cmath.exp(1j * kappa * n) / (2.0 * p.xi * math.sin(kappa))
    mu = math.acosh(abs(a))
    s = math.copysign(1.0, a)
    return complex(-s * s ** n * math.exp(-mu * n) / (2.0 * p.xi * math.sinh(mu)))


# --- broadened quadrature ----------------------------------------------------

def _geometric_points(center, scale, lo, hi, decades=40):
    pts = []
    for j in range(decades):
        off = scale * 2.0 ** j
        if off > hi - lo:
            break
        pts.extend((center - off, center + off))
    pts.append(center)
    return sorted({x for x in pts if lo < x < hi})


def _breakpoints(a, xi, eta):
    """Subdivision of [0, pi] that resolves the near-pole of the integrand."""
    if abs(a) < 1.0:
        kappa = math.acos(a)
        width = max(eta / (2.0 * xi * max(math.sin(kappa), 1e-300)), 1e-14)
        return _geometric_points(kappa, width, 0.0, math.pi)
    # evanescent: integrand peaks at q=0 (a>1) or q=pi (a<-1)
    width = max(math.sqrt(2.0 * abs(abs(a) - 1.0)), eta / (2.0 * xi), 1e-14)
    center = 0.0 if a > 0 else math.pi
    return _geometric_points(center, width, 0.0, math.pi)


def _chain_integral(a, xi, eta, n=0):
    """``(1/2pi) int dq exp(iqn) / (2 xi (cos q - a) + i eta)`` by quadrature."""
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta!r}")
    n = abs(int(n))

    def denom(q):
        return 2.0 * xi * (math.cos(q) - a)

    # the integrand is even in q: (1/pi) int_0^pi cos(nq) / (D + i eta)
    def re(q):
        dq = denom(q)
        return math.cos(n * q) * dq / (dq * dq + eta * eta)

    def im(q):
        dq = denom(q)
        return -math.cos(n * q) * eta / (dq * dq + eta * eta)

    pts = _breakpoints(a, xi, eta)
    limit = 50 * (len(pts) + 1) + 50 * n
    total = 0j
    err = 0.0
    for part, f in ((1.0, re), (1j, im)):
        with warnings.catch_warnings():
            # roundoff warnings are superseded by the explicit error check below
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, e = integrate.quad(f, 0.0, math.pi, points=pts or None, limit=limit,
                                    epsabs=QUAD_TOL * 1e-2, epsrel=1e-12)
        total += part * val
        err += e
    total /= math.pi
    err /= math.pi
    if err > QUAD_TOL * max(1.0, abs(total)):
        raise QuadratureError("chain Green's function quadrature did not converge", err)
    return total


def eta_ladder(a, xi, base=ETA_LADDER):
    """Broadenings for the extrapolation, compressed near a band edge.

    The broadened integral is analytic in ``eta`` with a radius of
    convergence set by the distance ``2 xi ||a| - 1|`` to the nearest band
    edge, so the ladder is rescaled when that distance drops below ``xi``.
    """
    gap = 2.0 * xi * abs(abs(a) - 1.0)
    scale = min(1.0, gap / xi)
    return tuple(xi * e * scale for e in base)


def extrapolate_to_zero(etas, values):
    """Polynomial (Richardson/Neville) extrapolation of ``values(eta)`` to 0."""
    etas = np.asarray(etas, dtype=float)
    values = np.asarray(values, dtype=complex)
    out = 0j
    for i, ei in enumerate(etas):
        w = 1.0
        for j, ej in enumerate(etas):
            if j != i:
                w *= ej / (ej - ei)
        out += w * values[i]
    return complex(out)


def sigma_l_quadrature(k: Momentum2, l: int, p: ModelParams, layer: LayerSpec | None = None,
                       eta: float = 1e-3) -> complex:
    """Broadened self-energy of channel ``l`` by direct numerical integration.

    Integrates ``|Omega|^2/(2 pi d) int dq [eps_k - eps(q, p_l) + i eta]^-1``
    over the Brillouin zone.

    Raises
    ------
    QuadratureError
        If the integrator's error estimate exceeds the tolerance.
    """
    if not 0 <= l < p.d:
        raise ValueError(f"channel index must lie in [0, {p.d - 1}], got {l}")
    omega2 = abs(_layer(p, layer).omega) ** 2
    if omega2 == 0.0:
        return 0j
    a = channel_cosine(k, l, p.d)
    return omega2 / p.d * _chain_integral(a, p.xi, eta)


def sigma_l_extrapolated(k: Momentum2, l: int, p: ModelParams,
                         layer: LayerSpec | None = None, etas=None) -> complex:
    """``eta -> 0`` limit of :func:`sigma_l_quadrature`."""
    if etas is None:
        etas = eta_ladder(channel_cosine(k, l, p.d), p.xi)
    vals = [sigma_l_quadrature(k, l, p, layer, eta) for eta in etas]
    return extrapolate_to_zero(etas, vals)


def lattice_green_phase_quadrature(energy, ky_out, dx, p: ModelParams, eta: float) -> complex:
    """Broadened version of :func:`lattice_green_phase` by quadrature."""
    return _chain_integral(_chain_cosine(energy, ky_out, p.xi), p.xi, eta, dx)


def lattice_green_phase_extrapolated(energy, ky_out, dx, p: ModelParams, etas=None) -> complex:
    a = _chain_cosine(energy, ky_out, p.xi)
    if etas is None:
        etas = eta_ladder(a, p.xi)
    vals = [_chain_integral(a, p.xi, eta, dx) for eta in etas]
    return extrapolate_to_zero(etas, vals)


# --- density of states -------------------------------------------------------

def dos_1d(energy, ky_out, p: ModelParams) -> DosPoint:
    """Density of states ``|dk/dE|`` of the chain ``E = -2 xi (cos k + cos ky_out)``.

    ``k`` runs over (0, pi), so the DOS integrates to ``pi`` over the band
    ``[eps(0, ky_out), eps(pi, ky_out)]``.

    Raises
    ------
    OutOfBandError
        If ``energy`` lies outside the band.
    """
    c = _chain_cosine(energy, ky_out, p.xi)
    status = classify_cosine(c)
    if status == BAND_EDGE:
        return DosPoint(float(energy), None, True)
    if status != OPEN:
        lo = dispersion(Momentum2(0.0, ky_out), p)
        hi = dispersion(Momentum2(math.pi, ky_out), p)
        raise OutOfBandError(f"energy {energy!r} outside the channel band [{lo}, {hi}]")
    return DosPoint(float(energy), 1.0 / (2.0 * p.xi * math.sqrt(1.0 - c * c)))


def channel_band(ky_out, p: ModelParams) -> tuple[float, float]:
    """Band limits ``(a_l, b_l)`` of the chain with transverse momentum ``ky_out``."""
    return (dispersion(Momentum2(0.0, ky_out), p), dispersion(Momentum2(math.pi, ky_out), p))


def sigma_l_from_dos(k: Momentum2, l: int, p: ModelParams, layer: LayerSpec | None = None):
    """Imaginary part of ``Sigma_l`` rebuilt from the 1D density of states.

    Both branches ``+k_lx`` and ``-k_lx`` feed the same energy, hence the
    factor ``2 * rho``. Returns 0 outside the band.
    """
    ky_out = float(fold_momentum(k.ky, l, p.d))
    omega2 = abs(_layer(p, layer).omega) ** 2
    try:
        pt = dos_1d(dispersion(k, p), ky_out, p)
    except OutOfBandError:
        return 0.0
    if pt.band_edge:
        return None
    return -omega2 / (2.0 * p.d) * 2.0 * pt.rho
