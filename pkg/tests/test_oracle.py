import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from ccaphoton.errors import IllConditionedError, SingularChannelError, WrapAroundError
from ccaphoton.lattice import ModelParams, Momentum2, open_channels
from ccaphoton.oracle import (PacketState, WavePacketSpec, channel_populations, column_hamiltonian,
                              default_ly, evolve_wavepacket, flux_probabilities, solve_strip_exact)
from ccaphoton.oracle import strip as strip_mod
from ccaphoton.scatter1 import FLUX_FACTOR, r_one, resonance_detuning
from ccaphoton.scatter2 import r_two

from conftest import K_REF, couplings, open_kx, periods

SMALL = dict(lx=256, sigma_x=0.1, sigma_y=0.1, guard=16)


def test_column_hamiltonian_is_hermitian_bloch_block():
    p = ModelParams(d=4, xi=1.3)
    ky = 0.37
    h = column_hamiltonian(ky, p)
    assert np.allclose(h, h.conj().T)
    # eigenvalues are -2 xi cos(p_l) on the folded momenta
    expected = sorted(-2 * 1.3 * math.cos(ky + 2 * math.pi * l / 4) for l in range(4))
    assert np.linalg.eigvalsh(h) == pytest.approx(expected, abs=1e-12)


def test_strip_zero_coupling_is_transparent():
    flux = flux_probabilities(solve_strip_exact(K_REF, ModelParams.one_layer(0.0, d=3)))
    assert flux.transmission == pytest.approx(1.0, abs=1e-12)
    assert flux.packet_total == pytest.approx(0.0, abs=1e-24)


@given(open_kx, periods, couplings, st.floats(-20, 20), st.integers(0, 6))
def test_strip_unitarity(kx, d, om, delta, gap):
    k = Momentum2(kx, math.pi / 4)
    assume(all(c.status != "band-edge" for c in open_channels(k, ModelParams(d=d))))
    if gap:
        p = ModelParams.two_layer(om, 0.7 * om, x2=gap, d=d, delta=delta)
    else:
        p = ModelParams.one_layer(om, d=d, delta=delta)
    try:
        flux = flux_probabilities(solve_strip_exact(k, p))
    except (IllConditionedError, SingularChannelError):
        assume(False)
    assert flux.unitarity == pytest.approx(1.0, abs=1e-10)


def test_strip_d1_reflection_maximal_at_resonance():
    p = ModelParams.one_layer(5.0, d=1)
    d0 = resonance_detuning(K_REF, p)
    grid = d0 + np.linspace(-2, 2, 401)
    refl = [flux_probabilities(solve_strip_exact(K_REF, p.with_delta(x))).scattered[(0, -1)]
            for x in grid]
    assert abs(grid[int(np.argmax(refl))] - d0) <= 0.01
    assert max(refl) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("kx", [math.pi / 8, 1.1, 2.5])
@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_strip_matches_closed_form_one_layer(kx, d):
    k = Momentum2(kx, math.pi / 4)
    p = ModelParams.one_layer(5.0, d=d, delta=-1.5)
    flux = flux_probabilities(solve_strip_exact(k, p))
    r = r_one(k, p)
    assert flux.packet_total == pytest.approx(FLUX_FACTOR * r.total, rel=1e-8)
    probs = {c.l: pr for c, pr in r.channels}
    for (l, s), v in flux.scattered.items():
        if l == 0:
            assert v == pytest.approx(FLUX_FACTOR * probs[0], rel=1e-8)
        else:
            assert v == pytest.approx(FLUX_FACTOR * probs[s * l], rel=1e-8, abs=1e-14)


def test_strip_zero_scattering_point():
    ky = math.pi / 4
    root = math.cos(ky + 2 * math.pi / 3) - math.cos(ky) + 1
    p = ModelParams.one_layer(5.0, d=3)
    near = flux_probabilities(solve_strip_exact(Momentum2(math.acos(root + 1e-7), ky), p))
    assert near.packet_total < 1e-6


def test_strip_errors(monkeypatch):
    p = ModelParams.one_layer(5.0, d=3)
    with pytest.raises(SingularChannelError):
        solve_strip_exact(Momentum2(0.0, 0.3), p)
    with pytest.raises(ValueError):
        solve_strip_exact(Momentum2(-1.0, 0.3), p)
    monkeypatch.setattr(strip_mod, "MAX_CONDITION", 1.0)
    with pytest.raises(IllConditionedError) as info:
        solve_strip_exact(K_REF, p)
    assert info.value.condition > 1.0


def test_default_ly():
    assert default_ly(1) == 120
    assert default_ly(7) == 126
    assert WavePacketSpec(K_REF, ly=30).resolved_ly(3) == 30
    with pytest.raises(ValueError):
        WavePacketSpec(K_REF, ly=31).resolved_ly(3)


def test_channel_populations_plane_wave():
    lx, ly, d = 64, 24, 3
    ky_out = math.pi / 4 + 2 * math.pi * 2 / d
    x, y = np.meshgrid(np.arange(lx), np.arange(ly), indexing="ij")
    psi = np.exp(-1j * (2 * math.pi * 5 / lx) * x + 1j * ky_out * y)
    psi /= np.linalg.norm(psi)
    pops = channel_populations(PacketState(psi, np.zeros((1, ly // d)), K_REF), ModelParams(d=d))
    assert pops[(2, -1)] == pytest.approx(1.0, abs=1e-12)
    assert sum(pops.values()) == pytest.approx(1.0, abs=1e-12)


def test_wraparound_precheck():
    spec = WavePacketSpec(Momentum2(0.3, math.pi / 4), lx=256, sigma_x=0.1, sigma_y=0.1)
    with pytest.raises(WrapAroundError):
        evolve_wavepacket(spec, ModelParams.one_layer(5.0, d=3))


def test_packet_zero_coupling_is_ballistic():
    spec = WavePacketSpec(Momentum2(1.5, math.pi / 4), ly=24, **SMALL)
    rep = evolve_wavepacket(spec, ModelParams.one_layer(0.0, d=3))
    assert rep.norm_drift < 1e-10
    assert rep.transmission == pytest.approx(1.0, abs=1e-10)
    assert max(rep.scattered.values()) < 1e-20
    assert not rep.inconclusive


def test_packet_small_lattice_against_strip():
    k = Momentum2(1.5, math.pi / 4)
    p = ModelParams.one_layer(2.0, d=1, delta=-1.0)
    flux = flux_probabilities(solve_strip_exact(k, p))
    spec = WavePacketSpec(k, ly=8, **SMALL)
    rep = evolve_wavepacket(spec, p, flux.scattered)
    assert rep.norm_drift < 1e-10
    assert rep.unitarity == pytest.approx(1.0, abs=1e-8)
    for key, val in flux.scattered.items():
        assert rep.scattered[key] == pytest.approx(val, rel=0.05)
    d = rep.to_dict()
    assert set(d["scattered"]) == {"0,+", "0,-"}
    assert d["relative_deltas"]["0,-"] == pytest.approx(rep.deltas[(0, -1)])


@pytest.mark.slow
def test_packet_two_layers_against_directional():
    k = Momentum2(2.5, math.pi / 4)
    p = ModelParams.two_layer(7.0, 5.0, x2=1, d=3, delta=-4.0)
    flux = flux_probabilities(solve_strip_exact(k, p))
    rep = evolve_wavepacket(WavePacketSpec(k, lx=2048), p, flux.scattered)
    assert rep.norm_drift < 1e-8
    assert FLUX_FACTOR * r_two(k, p, "directional").total == pytest.approx(flux.packet_total, rel=1e-8)
    for key, val in flux.scattered.items():
        if val > 1e-3:
            assert rep.scattered[key] == pytest.approx(val, rel=0.02)
