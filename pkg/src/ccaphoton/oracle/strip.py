"""Exact stationary scattering on the Bloch-reduced strip.

The y-period ``d`` together with the Bloch phase ``exp(i ky d)`` reduces the
2D lattice to a strip of ``d`` rows with twisted boundary conditions. Away
from the atomic columns the strip is a uniform lead whose modes
``chi_n lambda_n^x`` are obtained numerically (eigenvectors of the column
Hamiltonian, roots of the quadratic ``lambda + 1/lambda``). The columns
between the outermost layers are kept explicitly, together with one atomic
amplitude per layer, and the whole problem is a single dense linear system.
There is no truncation in x, so the result is exact up to linear-algebra
round-off.

Probabilities come out flux-normalised: ``|amp|^2 |sin k_lx| / |sin k0x|``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import IllConditionedError, SingularChannelError
from ..lattice import BAND_EDGE_TOL, ModelParams, Momentum2, dispersion, fold_momentum

__all__ = [
    "MAX_CONDITION",
    "StripChannel",
    "StripSolution",
    "FluxProbabilities",
    "column_hamiltonian",
    "solve_strip_exact",
    "flux_probabilities",
]

MAX_CONDITION = 1e12


@dataclass(frozen=True)
class StripChannel:
    """Outgoing amplitudes of one transverse channel ``l`` (``0 <= l < d``).

    ``forward``/``backward`` are the amplitudes of the right-/left-moving
    waves (``None`` for evanescent channels); ``forward`` of ``l = 0`` is the
    full transmitted amplitude, incident wave included.
    """

    l: int
    ky_out: float
    is_open: bool
    klx: float | None
    forward: complex | None
    backward: complex | None


@dataclass(frozen=True)
class StripSolution:
    k0: Momentum2
    channels: tuple[StripChannel, ...]
    forward_scattered: complex
    atoms: tuple[complex, ...]
    condition: float


@dataclass(frozen=True)
class FluxProbabilities:
    """Flux-normalised outgoing probabilities.

    ``scattered`` maps ``(l, direction)`` with ``direction = +1`` (along x)
    or ``-1`` to the scattered probability; for ``(0, +1)`` it is the
    forward-scattered part ``|t0 - 1|^2``. ``transmission`` is ``|t0|^2``.
    """

    scattered: dict = field(default_factory=dict)
    transmission: float = 1.0

    @property
    def unitarity(self) -> float:
        """``|t0|^2 + sum`` of every other outgoing flux; equals 1."""
        return self.transmission + math.fsum(
            v for key, v in self.scattered.items() if key != (0, 1))

    @property
    def packet_total(self) -> float:
        """Scattered flux over the ``2d - 1`` packets ``(0,+)``, ``(l,+/-)`` for ``l >= 1``."""
        return math.fsum(v for key, v in self.scattered.items() if key != (0, -1))

    @property
    def total(self) -> float:
        """Scattered flux over all ``2d`` outgoing packets."""
        return math.fsum(self.scattered.values())


def column_hamiltonian(ky: float, p: ModelParams) -> np.ndarray:
    """Cavity Hamiltonian of one strip column with twisted boundary phase ``exp(i ky d)``."""
    d = p.d
    h = np.zeros((d, d), dtype=complex)
    twist = np.exp(1j * ky * d)
    for y in range(d):
        up = y + 1
        if up < d:
            h[up, y] += -p.xi
            h[y, up] += -p.xi
        else:
            # phi(d) = twist * phi(0)
            h[d - 1, 0] += -p.xi * twist
            h[0, d - 1] += -p.xi * np.conj(twist)
    return h


def _lead_modes(h0, energy, xi):
    """Numerical lead modes at ``energy``.

    Returns ``(chi, lam_right, lam_left)``: the orthonormal column
    eigenvectors and, for each, the Bloch factor of the wave leaving the
    scatterer to the right and to the left.
    """
    evals, chi = np.linalg.eigh(h0)
    lam_r = np.empty(len(evals), dtype=complex)
    lam_l = np.empty(len(evals), dtype=complex)
    for n, e in enumerate(evals):
        c = (e - energy) / (2.0 * xi)
        if abs(abs(c) - 1.0) <= BAND_EDGE_TOL:
            raise SingularChannelError(f"strip lead mode {n} sits on a band edge (cos k = {c:.12g})")
        root = np.sqrt(complex(c * c - 1.0))
        roots = (c + root, c - root)
        if abs(c) < 1.0:
            # |lambda| = 1: right-moving has Im lambda > 0 (velocity 2 xi sin k)
            r, l_ = sorted(roots, key=lambda z: -z.imag)
        else:
            r, l_ = sorted(roots, key=abs)
        lam_r[n], lam_l[n] = r, l_
    return chi, lam_r, lam_l


def solve_strip_exact(k0: Momentum2, p: ModelParams) -> StripSolution:
    """Scattering amplitudes of a plane wave ``exp(i k0 . r)`` on the layers of ``p``.

    Raises
    ------
    SingularChannelError
        If the incident wave does not propagate or a lead mode sits on a
        band edge.
    IllConditionedError
        If the matching system's condition number exceeds :data:`MAX_CONDITION`.
    """
    d = p.d
    if abs(math.sin(k0.kx)) < 1e-9:
        raise SingularChannelError(f"incident kx={k0.kx!r} does not propagate")
    energy = dispersion(k0, p)
    h0 = column_hamiltonian(k0.ky, p)
    chi, lam_r, lam_l = _lead_modes(h0, energy, p.xi)

    ys = np.arange(d)
    u_in = np.exp(1j * k0.ky * ys) / math.sqrt(d)
    lam_in = np.exp(1j * k0.kx)
    if k0.kx < 0:
        raise ValueError("incident wave must travel along +x (kx > 0)")

    xs = [layer.x for layer in p.layers]
    x0, x1 = min(xs), max(xs)
    ncol = x1 - x0 + 1
    n_phi = ncol * d
    i_r = n_phi
    i_t = n_phi + d
    i_b = n_phi + 2 * d
    nl = len(p.layers)
    size = i_b + nl
    mat = np.zeros((size, size), dtype=complex)
    rhs = np.zeros(size, dtype=complex)

    def column(x):
        """Column ``x`` as (coefficient block d x size, constant d-vector)."""
        coef = np.zeros((d, size), dtype=complex)
        const = np.zeros(d, dtype=complex)
        if x0 <= x <= x1:
            j = (x - x0) * d
            coef[:, j:j + d] = np.eye(d)
        elif x < x0:
            s = x - x0
            const += u_in * lam_in ** s
            coef[:, i_r:i_r + d] = chi * lam_l ** s
        else:
            s = x - x1
            coef[:, i_t:i_t + d] = chi * lam_r ** s
        return coef, const

    row = 0
    eye = np.eye(d)
    for x in range(x0, x1 + 1):
        # (E - h0) phi(x) + xi (phi(x+1) + phi(x-1)) - sum_s conj(Omega_s) b_s e_0 = 0
        c_here, k_here = column(x)
        c_up, k_up = column(x + 1)
        c_dn, k_dn = column(x - 1)
        block = (energy * eye - h0) @ c_here + p.xi * (c_up + c_dn)
        const = (energy * eye - h0) @ k_here + p.xi * (k_up + k_dn)
        for s, layer in enumerate(p.layers):
            if layer.x == x:
                block[0, i_b + s] -= np.conj(layer.omega)
        mat[row:row + d] = block
        rhs[row:row + d] = -const
        row += d
    # continuity with the lead ansatz at the two outermost columns
    mat[row:row + d, (0):(d)] += np.eye(d)
    mat[row:row + d, i_r:i_r + d] -= chi
    rhs[row:row + d] = u_in
    row += d
    j1 = (x1 - x0) * d
    mat[row:row + d, j1:j1 + d] += np.eye(d)
    mat[row:row + d, i_t:i_t + d] -= chi
    row += d
    for s, layer in enumerate(p.layers):
        # (E - omega_a) b_s - Omega_s phi(x_s, y=0) = 0
        mat[row, i_b + s] = energy - p.omega_a
        mat[row, (layer.x - x0) * d] = -layer.omega
        row += 1
    assert row == size

    cond = float(np.linalg.cond(mat))
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise IllConditionedError("strip matching system is ill-conditioned", cond)
    sol = np.linalg.solve(mat, rhs)
    r = sol[i_r:i_r + d]
    t = sol[i_t:i_t + d]
    atoms = tuple(complex(b) for b in sol[i_b:i_b + nl])

    propagating = np.isclose(np.abs(lam_r), 1.0, rtol=0.0, atol=1e-12)
    channels = []
    for l in range(d):
        ky_out = float(fold_momentum(k0.ky, l, d))
        u_l = np.exp(1j * ky_out * ys) / math.sqrt(d)
        overlap = u_l.conj() @ chi
        weight = np.abs(overlap) ** 2
        n_best = int(np.argmax(weight))
        if not propagating[n_best]:
            channels.append(StripChannel(l, ky_out, False, None, None, None))
            continue
        klx = abs(float(np.angle(lam_r[n_best])))
        mask = propagating & (weight > 1e-12)
        fwd = complex(np.sum(overlap[mask] * t[mask]))
        bwd = complex(np.sum(overlap[mask] * r[mask]))
        channels.append(StripChannel(l, ky_out, True, klx, fwd, bwd))

    # free incident wave at column x1 for the forward-scattered part
    forward_scattered = channels[0].forward - lam_in ** (x1 - x0)
    return StripSolution(k0, tuple(channels), forward_scattered, atoms, cond)


def flux_probabilities(sol: StripSolution) -> FluxProbabilities:
    """Flux-normalised probabilities of every outgoing packet of ``sol``."""
    s0 = abs(math.sin(sol.k0.kx))
    out = {}
    trans = 0.0
    for ch in sol.channels:
        if not ch.is_open:
            continue
        w = abs(math.sin(ch.klx)) / s0
        out[(ch.l, -1)] = abs(ch.backward) ** 2 * w
        if ch.l == 0:
            trans = abs(ch.forward) ** 2 * w
            out[(0, 1)] = abs(sol.forward_scattered) ** 2 * w
        else:
            out[(ch.l, 1)] = abs(ch.forward) ** 2 * w
    return FluxProbabilities(out, trans)
