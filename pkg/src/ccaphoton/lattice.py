"""Kinematics of the square coupled-cavity array.

Photons hop between nearest-neighbour cavities with strength ``xi``; the bare
cavity frequency is pinned to zero, so the atomic transition sits at
``-delta``. Two-level atoms occupy every ``d``-th cavity of one or two
columns. Translation by ``d`` sites along y folds the outgoing transverse
momentum onto ``d`` values ``p_l(ky)``; each of them defines a quasi-1D
channel whose longitudinal momentum is fixed by energy conservation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

__all__ = [
    "BAND_EDGE_TOL",
    "OPEN",
    "EVANESCENT",
    "BAND_EDGE",
    "LayerSpec",
    "ModelParams",
    "Momentum2",
    "Channel",
    "wrap_angle",
    "dispersion",
    "fold_momentum",
    "channel_cosine",
    "classify_cosine",
    "open_channels",
    "transverse_channels",
]

#: ``|A_l|`` closer than this to 1 counts as a band edge.
BAND_EDGE_TOL = 1e-9

OPEN = "open"
EVANESCENT = "evanescent"
BAND_EDGE = "band-edge"


def wrap_angle(theta):
    """Reduce ``theta`` into the half-open interval (-pi, pi].

    Works on scalars and arrays.
    """
    theta = np.asarray(theta, dtype=float)
    out = theta - 2.0 * np.pi * np.ceil((theta - np.pi) / (2.0 * np.pi))
    # rounding can land one ulp outside the interval near -pi / pi
    out = np.where(out > np.pi, out - 2.0 * np.pi, out)
    out = np.where(out <= -np.pi, out + 2.0 * np.pi, out)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class LayerSpec:
    """One column of atoms.

    Parameters
    ----------
    x : int
        Column index of the layer.
    omega : complex
        Atom-photon coupling.
    """

    x: int = 0
    omega: complex = 0.0

    def __post_init__(self):
        if int(self.x) != self.x:
            raise ValueError(f"layer position must be an integer, got {self.x!r}")
        object.__setattr__(self, "x", int(self.x))
        object.__setattr__(self, "omega", complex(self.omega))


@dataclass(frozen=True)
class ModelParams:
    """Lattice and atom parameters.

    Parameters
    ----------
    xi : float
        Hopping strength, > 0.
    delta : float
        Photon-atom detuning ``omega_c - omega_a``; ``omega_c`` is fixed to 0.
    d : int
        Atomic period along y.
    layers : sequence of LayerSpec
        One or two atomic columns.
    """

    xi: float = 1.0
    delta: float = 0.0
    d: int = 1
    layers: tuple[LayerSpec, ...] = field(default_factory=lambda: (LayerSpec(),))

    def __post_init__(self):
        if not self.xi > 0:
            raise ValueError(f"xi must be positive, got {self.xi!r}")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"d must be a positive integer, got {self.d!r}")
        layers = tuple(self.layers)
        if not 1 <= len(layers) <= 2:
            raise ValueError(f"expected 1 or 2 layers, got {len(layers)}")
        object.__setattr__(self, "layers", layers)
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "xi", float(self.xi))
        object.__setattr__(self, "delta", float(self.delta))

    @classmethod
    def one_layer(cls, omega, *, xi=1.0, delta=0.0, d=1, x=0):
        return cls(xi=xi, delta=delta, d=d, layers=(LayerSpec(x, omega),))

    @classmethod
    def two_layer(cls, omega1, omega2, *, x1=0, x2=1, xi=1.0, delta=0.0, d=1):
        return cls(xi=xi, delta=delta, d=d,
                   layers=(LayerSpec(x1, omega1), LayerSpec(x2, omega2)))

    @property
    def omega_a(self) -> float:
        """Atomic transition energy in units where ``omega_c = 0``."""
        return -self.delta

    @property
    def degenerate_layers(self) -> bool:
        """True for two layers sitting in the same column with equal coupling."""
        if len(self.layers) < 2:
            return False
        a, b = self.layers
        return a.x == b.x and a.omega == b.omega

    def with_delta(self, delta) -> "ModelParams":
        return replace(self, delta=float(delta))


@dataclass(frozen=True)
class Momentum2:
    """Bloch momentum; both components are reduced into (-pi, pi]."""

    kx: float
    ky: float

    def __post_init__(self):
        object.__setattr__(self, "kx", float(wrap_angle(self.kx)))
        object.__setattr__(self, "ky", float(wrap_angle(self.ky)))

    def __iter__(self):
        return iter((self.kx, self.ky))


@dataclass(frozen=True)
class Channel:
    """One folded outgoing branch.

    ``klx`` is the magnitude of the longitudinal momentum (``None`` unless
    the channel is open); the direction of travel is ``sign(l)``, with
    ``l = 0`` meaning forward along the incident direction.
    """

    l: int
    ky_out: float
    a: float
    klx: float | None
    status: str

    @property
    def is_open(self) -> bool:
        return self.status == OPEN

    @property
    def signed_klx(self) -> float | None:
        if self.klx is None:
            return None
        return -self.klx if self.l < 0 else self.klx


def dispersion(k: Momentum2, p: ModelParams) -> float:
    """Photon energy ``-2 xi (cos kx + cos ky)`` of the bare array."""
    return -2.0 * p.xi * (math.cos(k.kx) + math.cos(k.ky))


def fold_momentum(ky, l, d):
    """Transverse momentum ``p_l(ky)`` reached by the l-th reciprocal vector.

    Only ``|l|`` matters; the result lies in (-pi, pi].
    """
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d!r}")
    return wrap_angle(ky + 2.0 * np.pi * abs(l) / d)


def channel_cosine(k: Momentum2, l: int, d: int) -> float:
    """``A_l = cos kx + cos ky - cos p_l(ky)``, the cosine of ``k_lx``."""
    return math.cos(k.kx) + math.cos(k.ky) - math.cos(fold_momentum(k.ky, l, d))


def classify_cosine(a: float, tol: float = BAND_EDGE_TOL) -> str:
    if abs(abs(a) - 1.0) <= tol:
        return BAND_EDGE
    return OPEN if abs(a) < 1.0 else EVANESCENT


def open_channels(k0: Momentum2, p: ModelParams) -> list[Channel]:
    """All ``2d - 1`` outgoing branches ``l = -(d-1) .. d-1`` for incidence ``k0``.

    Closed branches are returned with status ``evanescent`` or ``band-edge``
    rather than dropped.
    """
    out = []
    for l in range(-(p.d - 1), p.d):
        a = channel_cosine(k0, l, p.d)
        status = classify_cosine(a)
        klx = math.acos(a) if status == OPEN else None
        out.append(Channel(l=l, ky_out=float(fold_momentum(k0.ky, l, p.d)),
                           a=a, klx=klx, status=status))
    return out


def transverse_channels(k: Momentum2, d: int) -> Sequence[Channel]:
    """The ``d`` distinct transverse branches ``l = 0 .. d-1`` (direction-free)."""
    out = []
    for l in range(d):
        a = channel_cosine(k, l, d)
        status = classify_cosine(a)
        out.append(Channel(l=l, ky_out=float(fold_momentum(k.ky, l, d)), a=a,
                           klx=math.acos(a) if status == OPEN else None,
                           status=status))
    return out
