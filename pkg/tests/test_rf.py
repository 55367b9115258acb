import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sdmasim.rf import (SimParams, complex_normal, generate_channels, generate_topology,
                        noisy_effective_channel, noisy_intf_column, path_loss)

P = SimParams()


def test_default_params_match_link_budget():
    assert P.tx_power_mw == pytest.approx(316.2278, rel=1e-6)
    assert 10 * np.log10(P.noise_var_mw) == pytest.approx(-113.0)
    assert (P.n_antennas, P.n_subcarriers) == (4, 64)


@pytest.mark.parametrize("kw", [dict(n_antennas=0), dict(n_subcarriers=0),
                                dict(guard_fraction=1.0), dict(tx_power_mw=0.0),
                                dict(noise_var_mw=-1.0)])
def test_params_reject_invalid(kw):
    with pytest.raises(ValueError):
        SimParams(**kw)


def test_single_link_inside_box():
    topo = generate_topology(1, P, np.random.default_rng(3))
    pts = np.vstack([topo.tx_positions, topo.rx_positions])
    assert pts.shape == (2, 2)
    assert np.all((pts >= 0) & (pts <= 200))
    assert list(topo.access_order) == [0]


def test_topology_seeded():
    a = generate_topology(4, P, np.random.default_rng(11))
    b = generate_topology(4, P, np.random.default_rng(11))
    np.testing.assert_array_equal(a.tx_positions, b.tx_positions)
    np.testing.assert_array_equal(a.rx_positions, b.rx_positions)


def test_topology_coordinate_means():
    rng = np.random.default_rng(0)
    pts = np.array([np.vstack([t.tx_positions, t.rx_positions])
                    for t in (generate_topology(4, P, rng) for _ in range(10_000))])
    means = pts.reshape(-1, 2).mean(axis=0)
    assert np.all(np.abs(means - 100.0) < 5.0)


def test_zero_links_rejected():
    with pytest.raises(ValueError):
        generate_topology(0, P, np.random.default_rng(0))


def test_path_loss_reference_values():
    # oracle: (lambda / 4 pi)^2 evaluated by hand
    g1 = (0.125 / (4 * np.pi)) ** 2
    assert path_loss(1.0, P) == pytest.approx(9.8946e-5, rel=1e-4)
    assert path_loss(1.0, P) == pytest.approx(g1, rel=1e-12)
    assert 10 * np.log10(path_loss(1.0, P)) == pytest.approx(-40.05, abs=0.005)
    assert path_loss(10.0, P) == pytest.approx(9.8946e-8, rel=1e-4)
    assert 10 * np.log10(path_loss(10.0, P)) == pytest.approx(-70.05, abs=0.005)
    assert path_loss(0.5, P) == path_loss(1.0, P)


@pytest.mark.parametrize("d", [0.0, -3.0])
def test_path_loss_rejects_nonpositive(d):
    with pytest.raises(ValueError):
        path_loss(d, P)


@given(st.floats(1.0, 1e4), st.floats(1.0001, 10.0))
def test_path_loss_strictly_decreasing(d, factor):
    assert path_loss(d * factor, P) < path_loss(d, P)


def test_channel_shapes_and_gains():
    rng = np.random.default_rng(1)
    topo = generate_topology(2, P, rng)
    ch = generate_channels(topo, P, 0.0, rng)
    assert ch.true_channels.shape == (2, 2, 64, 4, 4)
    assert np.all(np.isfinite(ch.true_channels))
    assert np.all((ch.pathloss_gains > 0) & (ch.pathloss_gains <= 1))
    d = np.linalg.norm(topo.rx_positions[1] - topo.tx_positions[0])
    assert ch.pathloss_gains[1, 0] == pytest.approx(path_loss(d, P))


def test_channel_moments():
    rng = np.random.default_rng(2)
    x = complex_normal(rng, 100_000)
    assert abs(x.mean()) < 0.01
    assert np.mean(np.abs(x) ** 2) == pytest.approx(1.0, abs=0.02)
    # real and imaginary parts each carry half the power
    assert np.var(x.real) == pytest.approx(0.5, abs=0.01)
    # 10 links -> 100 pairs x 64 x 16 = 102400 entries
    topo = generate_topology(10, P, rng)
    h = generate_channels(topo, P, 0.0, rng).true_channels
    assert np.mean(np.abs(h) ** 2) == pytest.approx(1.0, abs=0.02)
    assert abs(h.mean()) < 0.01


def test_channels_bit_identical_with_seed():
    def build(seed):
        rng = np.random.default_rng(seed)
        topo = generate_topology(3, P, rng)
        return generate_channels(topo, P, 0.1, rng)
    a, b = build(5), build(5)
    np.testing.assert_array_equal(a.true_channels, b.true_channels)
    np.testing.assert_array_equal(a.noise_rng().standard_normal(8), b.noise_rng().standard_normal(8))
    # the noise stream restarts on every request
    np.testing.assert_array_equal(a.noise_rng().standard_normal(8), a.noise_rng().standard_normal(8))


@pytest.mark.parametrize("perturb", [noisy_effective_channel, noisy_intf_column])
class TestEstimationNoise:
    def test_zero_variance_is_identity(self, perturb):
        h = complex_normal(np.random.default_rng(0), 4)
        np.testing.assert_array_equal(perturb(h, 0.0, np.random.default_rng(1)), h)

    def test_perturbation_variance(self, perturb):
        s2 = 0.1 * P.noise_var_mw
        h = complex_normal(np.random.default_rng(0), 4) * 1e-5
        out = perturb(np.broadcast_to(h, (100_000, 4)), s2, np.random.default_rng(1))
        msq = np.mean(np.abs(out - h) ** 2)
        assert msq == pytest.approx(s2, rel=0.02)

    def test_zero_input_unit_variance(self, perturb):
        out = perturb(np.zeros((50_000, 4), complex), 1.0, np.random.default_rng(2))
        assert np.mean(np.sum(np.abs(out) ** 2, axis=-1)) == pytest.approx(4.0, rel=0.02)

    def test_negative_variance_rejected(self, perturb):
        with pytest.raises(ValueError):
            perturb(np.zeros(4), -1.0, np.random.default_rng(0))


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_every_pair_present_and_finite(k, seed):
    rng = np.random.default_rng(seed)
    topo = generate_topology(k, SimParams(n_subcarriers=4), rng)
    ch = generate_channels(topo, SimParams(n_subcarriers=4), 0.0, rng)
    assert ch.true_channels.shape[:2] == (k, k)
    assert ch.pathloss_gains.shape == (k, k)
    assert np.all(np.isfinite(ch.true_channels))
    assert sorted(topo.access_order) == list(range(k))
