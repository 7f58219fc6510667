import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from ccaphoton.errors import DivergentSelfEnergyError, SingularChannelError
from ccaphoton.green import detect_divergence, sigma_total
from ccaphoton.lattice import ModelParams, Momentum2, fold_momentum, open_channels
from ccaphoton.scatter1 import (FLUX_FACTOR, bare_crossing, beta_coeff, p_channel, r_one,
                                resonance_detuning, u_one)

from conftest import K_REF, angles, couplings, hoppings, open_kx, periods

P0_PEAK = 1.0 / (4.0 * math.pi ** 2)


def _at_resonance(k, p):
    return p.with_delta(resonance_detuning(k, p))


def test_beta_zero_coupling():
    assert beta_coeff(K_REF, ModelParams.one_layer(0.0)) == 0


def test_beta_at_resonance():
    p = _at_resonance(K_REF, ModelParams.one_layer(5.0, d=3))
    sig = sigma_total(K_REF, p).value
    b = beta_coeff(K_REF, p)
    assert b == pytest.approx(5 / (2 * math.pi) / (-1j * sig.imag), rel=1e-12)
    for shift in (-0.5, -0.01, 0.01, 0.5):
        assert abs(beta_coeff(K_REF, p.with_delta(p.delta + shift))) < abs(b)


def test_beta_divergent_is_zero():
    ky = math.pi / 4
    k = Momentum2(math.acos(math.cos(fold_momentum(ky, 2, 3)) - math.cos(ky) + 1), ky)
    assert beta_coeff(k, ModelParams.one_layer(5.0, d=3)) == 0


def test_u_one_examples():
    assert u_one(K_REF, ModelParams.one_layer(0.0)) == 0
    for d in (1, 2, 3):
        p = _at_resonance(K_REF, ModelParams.one_layer(5.0, d=d))
        assert abs(u_one(K_REF, p)) == pytest.approx(0.121811919800554, rel=1e-12)
    p = _at_resonance(K_REF, ModelParams.one_layer(5.0, d=1))
    assert abs(u_one(K_REF, p)) == pytest.approx(math.sin(math.pi / 8) / math.pi, rel=1e-13)


def test_u_one_decays_as_inverse_delta():
    p = ModelParams.one_layer(5.0, d=2)
    big = [abs(u_one(K_REF, p.with_delta(x))) * x for x in (1e5, 1e6, 1e7)]
    assert big[-1] == pytest.approx(25 / (2 * math.pi * 2), rel=1e-5)
    assert big == pytest.approx([big[-1]] * 3, rel=1e-3)


def test_p_channel_examples():
    assert p_channel(K_REF, 0, ModelParams.one_layer(0.0)) == 0
    p = _at_resonance(K_REF, ModelParams.one_layer(5.0, d=1))
    assert p_channel(K_REF, 0, p) == pytest.approx(P0_PEAK, abs=1e-14)
    assert P0_PEAK == pytest.approx(0.025330, abs=5e-7)


def test_p_channel_errors():
    p = ModelParams.one_layer(5.0, d=3)
    with pytest.raises(ValueError):
        p_channel(K_REF, 3, p)
    with pytest.raises(SingularChannelError):
        p_channel(Momentum2(0.0, 0.3), 0, p)
    ky = math.pi / 4
    edge = Momentum2(math.acos(math.cos(fold_momentum(ky, 1, 3)) - math.cos(ky) - 1 + 2), ky)
    # A_1 = 1 exactly: the band-edge channel is singular
    chans = {c.l: c for c in open_channels(edge, p)}
    assert chans[1].status == "band-edge"
    with pytest.raises(SingularChannelError):
        p_channel(edge, 1, p)


def test_evanescent_channels_are_zero():
    r = r_one(K_REF, ModelParams.one_layer(5.0, d=3))
    for l in (-2, -1, 1, 2):
        assert r.probability(l) == 0.0
    assert r.total == r.probability(0)
    with pytest.raises(KeyError):
        r.probability(3)


@given(open_kx, angles, periods, hoppings, couplings, st.floats(-20, 20))
def test_r_one_invariants(kx, ky, d, xi, om, delta):
    k = Momentum2(kx, ky)
    p = ModelParams.one_layer(om, d=d, xi=xi, delta=delta)
    chans = open_channels(k, p)
    assume(all(c.status != "band-edge" for c in chans))
    r = r_one(k, p)
    probs = {c.l: pr for c, pr in r.channels}
    for l, pr in probs.items():
        assert pr >= 0
        assert probs[-l] == pytest.approx(pr, rel=1e-12, abs=1e-300)
    expected = probs[0] + 2 * sum(probs[l] for l in range(1, d))
    assert r.total == pytest.approx(expected, rel=1e-12, abs=1e-300)
    if r.divergent:
        assert r.total == 0 and all(pr == 0 for pr in probs.values())
    else:
        # forward-scattered flux overlaps the transmitted wave; the rest obeys unitarity
        assert FLUX_FACTOR * probs[0] <= 1 + 1e-9
        assert FLUX_FACTOR * (r.total - probs[0]) <= 1 + 1e-9


def test_r_one_divergent_point():
    ky = math.pi / 4
    k = Momentum2(math.acos(math.cos(fold_momentum(ky, 2, 3)) - math.cos(ky) + 1), ky)
    p = ModelParams.one_layer(5.0, d=3)
    r = r_one(k, p)
    assert r.divergent and r.total == 0
    assert math.isnan(r.lamb_shift)
    assert detect_divergence(k, p) == [2]


def test_r_one_rejects_band_edge_incidence():
    with pytest.raises(SingularChannelError):
        r_one(Momentum2(math.pi, 0.3), ModelParams.one_layer(5.0))


def test_r_one_zero_scattering_points():
    ky = math.pi / 4
    p = ModelParams.one_layer(5.0, d=3)
    for l in (1, 2):
        root = math.cos(fold_momentum(ky, l, 3)) - math.cos(ky) + 1
        near = r_one(Momentum2(math.acos(root + 1e-9), ky), p).total
        far = r_one(Momentum2(math.acos(root + 0.05), ky), p).total
        assert near < 1e-6 < far


def test_resonance_detuning_examples():
    base = 2 * (math.cos(math.pi / 8) + math.cos(math.pi / 4))
    assert resonance_detuning(K_REF, ModelParams.one_layer(5.0, d=1)) == pytest.approx(base, rel=1e-15)
    assert base == pytest.approx(3.26197, abs=5e-6)
    assert resonance_detuning(K_REF, ModelParams.one_layer(0.0, d=3)) == base
    d3 = resonance_detuning(K_REF, ModelParams.one_layer(5.0, d=3))
    assert d3 == pytest.approx(base - 6.173058641575581, rel=1e-9)
    assert bare_crossing(K_REF, ModelParams()) == base


def test_resonance_is_argmax():
    p = ModelParams.one_layer(5.0, d=3)
    d0 = resonance_detuning(K_REF, p)
    grid = np.arange(-20.0, 15.0, 1e-3)
    vals = [r_one(K_REF, p.with_delta(x)).total for x in grid]
    assert abs(grid[int(np.argmax(vals))] - d0) <= 1e-3


def test_resonance_detuning_divergent():
    ky = math.pi / 4
    k = Momentum2(math.acos(math.cos(fold_momentum(ky, 2, 3)) - math.cos(ky) + 1), ky)
    with pytest.raises(DivergentSelfEnergyError):
        resonance_detuning(k, ModelParams.one_layer(5.0, d=3))


@given(couplings)
def test_linewidth_scales_with_coupling(om):
    r1 = r_one(K_REF, ModelParams.one_layer(om, d=3))
    r2 = r_one(K_REF, ModelParams.one_layer(2 * om, d=3))
    assert r2.linewidth == pytest.approx(4 * r1.linewidth, rel=1e-14)
    assert r2.lamb_shift == pytest.approx(4 * r1.lamb_shift, rel=1e-14)


@given(st.floats(-30, 30), st.floats(-30, 30))
def test_lorentzian_form(x, y):
    p = ModelParams.one_layer(5.0, d=2)
    r = r_one(K_REF, p)
    d0 = resonance_detuning(K_REF, p)
    gamma = r.linewidth

    def rel(delta):
        return r_one(K_REF, p.with_delta(delta)).total * ((delta - d0) ** 2 + gamma ** 2)

    assert rel(x) == pytest.approx(rel(y), rel=1e-12)
