import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from src.core.gof import GofReport, envelope_coverage, posterior_predictive_gof, weighted_degree, weighted_degrees
from src.core.network import WeightedNetwork, recompose
from src.core.simulation import SimControl, simulate_stack, simulate_weighted
from src.core.statistics import ModelSpec
from src.errors import ConfigError, NetworkError, SpecError
from src.inference.exchange import run_inference
from src.inference.niw import NIWParams
from src.inference.run_config import RunConfig

from strategies import weighted_networks


def test_weighted_degree_examples(small_network):
    assert weighted_degree(small_network, 0) == 3 + 2 + 2
    assert weighted_degree(small_network, 5) == 3 + 1
    np.testing.assert_array_equal(weighted_degrees(small_network), [7, 5, 5, 3, 6, 4])
    with pytest.raises(NetworkError):
        weighted_degree(small_network, 6)


def test_empty_network_has_zero_degrees():
    np.testing.assert_array_equal(weighted_degrees(WeightedNetwork.empty(4)), np.zeros(4))


@settings(max_examples=300, deadline=None)
@given(weighted_networks())
def test_handshake_identity(y):
    total = sum(w for _, _, w in y.edges())
    assert weighted_degrees(y).sum() == 2 * total
    assert all(weighted_degree(y, k) == d for k, d in enumerate(weighted_degrees(y)))


@settings(max_examples=200, deadline=None)
@given(arrays(np.int64, st.tuples(st.integers(1, 30), st.integers(1, 8)), elements=st.integers(0, 20)),
       st.data())
def test_wider_band_never_lowers_coverage(simulated, data):
    observed = data.draw(arrays(np.int64, simulated.shape[1], elements=st.integers(0, 20)))
    narrow = envelope_coverage(observed, simulated, 0.25, 0.75)
    wide = envelope_coverage(observed, simulated, 0.025, 0.975)
    full = envelope_coverage(observed, simulated, 0.0, 1.0)
    assert narrow <= wide <= full


def test_invalid_band_is_rejected():
    with pytest.raises(ConfigError):
        envelope_coverage([1], [[1]], 0.9, 0.1)


def test_report_validation():
    with pytest.raises(NetworkError):
        GofReport(observed=[1, 2, 3], simulated=np.zeros((4, 2)))
    with pytest.raises(ConfigError):
        GofReport(observed=[1, 2], simulated=np.zeros((4, 2)), quantile_levels=(0.9, 0.1))


def test_report_frames():
    simulated = np.array([[1, 4, 0], [3, 2, 0], [2, 6, 1], [4, 8, 1]])
    report = GofReport(observed=np.array([2, 9, 0]), simulated=simulated)
    env = report.envelope_frame()
    assert len(env) == report.n_nodes * len(report.quantile_levels)
    assert list(env.columns) == ['node', 'quantile', 'value', 'observed']
    medians = env[env['quantile'] == 0.5].set_index('node')['value']
    np.testing.assert_allclose(medians.to_numpy(), [2.5, 5.0, 0.5])
    assert report.coverage == pytest.approx(2 / 3)

    long = report.long_frame()
    assert len(long) == report.n_nodes * (report.n_replicates + 1)
    assert (long.loc[long['source'] == 'observed', 'replicate'] == -1).all()


def test_posterior_predictive_gof_is_deterministic(small_network):
    spec = ModelSpec.of('edges')
    draws = np.array([[[0.5], [-0.5], [-1.0]], [[0.2], [0.0], [-0.5]]])
    ctrl = SimControl(steps_per_edge=5)
    a = posterior_predictive_gof(draws, spec, None, small_network, 8, ctrl, np.random.default_rng(9))
    b = posterior_predictive_gof(draws, spec, None, small_network, 8, ctrl, np.random.default_rng(9))
    np.testing.assert_array_equal(a.simulated, b.simulated)
    assert a.simulated.shape == (8, 6)
    assert a.simulated.max() <= 3 * 5
    np.testing.assert_array_equal(a.observed, weighted_degrees(small_network))


def test_posterior_predictive_gof_checks_dimensions(small_network, rng):
    spec = ModelSpec.of('edges')
    with pytest.raises(SpecError):
        posterior_predictive_gof(np.zeros((2, 3, 2)), spec, None, small_network, 4, rng=rng)
    with pytest.raises(NetworkError):
        posterior_predictive_gof(np.zeros((2, 2, 1)), spec, None, small_network, 4, rng=rng)
    with pytest.raises(ConfigError):
        posterior_predictive_gof(np.zeros((0, 3, 1)), spec, None, small_network, 4, rng=rng)
    with pytest.raises(ConfigError):
        posterior_predictive_gof(np.zeros((2, 3, 1)), spec, None, small_network, 0, rng=rng)


def _self_consistent_coverage(n_nodes, n_replicates, seed):
    spec = ModelSpec.of('edges')
    phis = [[0.4], [0.0], [-0.4]]
    ctrl = SimControl(steps_per_edge=10)
    rng = np.random.default_rng(seed)
    observed = simulate_weighted(phis, spec, None, n_nodes, 3, ctrl, rng)
    report = posterior_predictive_gof(np.array([phis]), spec, None, observed, n_replicates, ctrl, rng)
    return report.coverage


def test_true_parameters_cover_their_own_data():
    assert _self_consistent_coverage(15, 60, seed=31) >= 0.7


@pytest.mark.slow
def test_refitted_model_covers_its_own_data():
    spec = ModelSpec.of('edges', 'gwesp')
    phis = [[-1.0, 0.2], [0.0, 0.2], [-0.5, 0.2]]
    ctrl = SimControl(steps_per_edge=10)
    rng = np.random.default_rng(32)
    observed = simulate_stack(phis, spec, None, 30, 3, ctrl, rng)
    cfg = RunConfig(chains=4, iterations=600, burn_in=0.5, thinning=2, steps_per_edge=3, seed=33)
    sample = run_inference(observed, spec, None, NIWParams.default(2), cfg)
    report = posterior_predictive_gof(sample.flat_phi(), spec, None, recompose(observed), 200, ctrl, rng)
    assert report.coverage >= 0.9
