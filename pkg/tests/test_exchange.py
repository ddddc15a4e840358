import math
from collections import Counter
from pathlib import Path

import numpy as np
import pytest
from scipy import stats
from scipy.integrate import cumulative_trapezoid

from src.core.gof import posterior_predictive_gof
from src.core.network import BinaryLayer, LayerStack, WeightedNetwork, decompose, ordinalize
from src.core.simulation import SimControl, draw_layer_params, simulate_stack
from src.core.statistics import ModelSpec
from src.data_loader import load_karate, read_raw_edgelist
from src.errors import ConfigError, NetworkError
from src.inference.exchange import (ChainState, ads_log_density, ads_propose, choose_partner_chains,
                                    exchange_update_layer, observed_transition_statistics, run_inference)
from src.inference.niw import HyperState, NIWParams
from src.inference.run_config import RunConfig, load_config

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def _quick_config(**kwargs):
    settings = dict(chains=3, iterations=6, burn_in=0.5, thinning=1, steps_per_edge=2, seed=4)
    settings.update(kwargs)
    return RunConfig(**settings)


def test_partner_chains_are_distinct(rng):
    seen = Counter()
    for _ in range(600):
        h1, h2 = choose_partner_chains(1, 4, rng)
        assert h1 != h2 and 1 not in (h1, h2)
        seen[(h1, h2)] += 1
    assert set(seen) == {(0, 2), (2, 0), (0, 3), (3, 0), (2, 3), (3, 2)}


def test_partner_chains_need_three_chains(rng):
    with pytest.raises(ConfigError, match="au moins 3"):
        choose_partner_chains(0, 2, rng)


def test_ads_proposal_density_is_symmetric(rng):
    phi, phi_1, phi_2 = rng.normal(size=(3, 4))
    gamma, sigma = 0.5, 0.025
    proposal = ads_propose(phi, phi_1, phi_2, gamma, sigma, rng)
    forward = ads_log_density(proposal, phi, phi_1, phi_2, gamma, sigma)
    backward = ads_log_density(phi, proposal, phi_2, phi_1, gamma, sigma)
    assert forward == pytest.approx(backward, abs=1e-12)


def test_ads_without_noise_moves_along_chain_difference(rng):
    out = ads_propose([1.0, 1.0], [2.0, 0.0], [0.0, 0.0], 0.5, 0.0, rng)
    np.testing.assert_allclose(out, [2.0, 1.0])


def test_joint_prior_ratio_reduces_to_single_layer():
    hyper = HyperState(mu=[0.2, -0.4], sigma=[[1.0, 0.3], [0.3, 0.8]])
    phis = np.array([[0.1, 0.5], [-1.0, 0.2], [0.7, -0.3]])
    proposal = phis.copy()
    proposal[1] = [-0.6, 0.9]
    joint = sum(hyper.log_density(p) for p in proposal) - sum(hyper.log_density(p) for p in phis)
    single = hyper.log_density(proposal[1]) - hyper.log_density(phis[1])
    assert joint == pytest.approx(single, abs=1e-12)


def test_empty_conditioning_layer_draws_from_hyper():
    y = WeightedNetwork.from_edges(4, [(0, 1, 1), (1, 2, 1)])
    observed = decompose(y, 3)
    hyper = HyperState(mu=[0.5], sigma=[[0.25]])
    chain = ChainState(phis=np.zeros((3, 1)), hyper=hyper)
    value, accepted = exchange_update_layer(3, 0, np.zeros((3, 3, 1)), chain, ModelSpec.of('edges'), None,
                                            observed, _quick_config(), np.random.default_rng(1))
    assert accepted
    np.testing.assert_array_equal(value, hyper.draw(np.random.default_rng(1)))


def test_identical_proposal_is_always_accepted(small_stack, rng):
    chain = ChainState(phis=[[0.3], [-0.2], [0.1]], hyper=HyperState(mu=[0.0], sigma=[[1.0]]))
    for w in (1, 2, 3):
        value, accepted = exchange_update_layer(w, 0, np.zeros((3, 3, 1)), chain, ModelSpec.of('edges'), None,
                                                small_stack, _quick_config(), rng,
                                                proposal=chain.phis[w - 1].copy())
        assert accepted
        np.testing.assert_array_equal(value, chain.phis[w - 1])


def test_observed_transition_statistics(small_stack):
    s_obs = observed_transition_statistics(small_stack, ModelSpec.of('edges'))
    np.testing.assert_array_equal(s_obs[:, 0], small_stack.edge_counts)


def test_run_inference_shapes_and_counters(small_stack):
    cfg = _quick_config()
    sample = run_inference(small_stack, ModelSpec.of('edges', 'gwesp'), None, NIWParams.default(2), cfg)
    assert sample.phi.shape == (3, 3, 3, 2)
    assert sample.mu.shape == (3, 3, 2)
    assert sample.sigma.shape == (3, 3, 2, 2)
    np.testing.assert_array_equal(sample.iterations, [3, 4, 5])
    assert sample.labels == ('edges', 'gwesp')
    np.testing.assert_array_equal(sample.proposed, np.full((3, 3), cfg.iterations))
    assert np.all(sample.accepted <= sample.proposed)
    assert np.all(np.isfinite(sample.phi))
    predictive = sample.predictive_phi(np.random.default_rng(0))
    assert predictive.shape == (sample.n_draws, 2)


def test_run_inference_is_deterministic(small_stack):
    spec = ModelSpec.of('edges')
    a = run_inference(small_stack, spec, None, NIWParams.default(1), _quick_config())
    b = run_inference(small_stack, spec, None, NIWParams.default(1), _quick_config())
    np.testing.assert_array_equal(a.phi, b.phi)
    np.testing.assert_array_equal(a.sigma, b.sigma)
    c = run_inference(small_stack, spec, None, NIWParams.default(1), _quick_config(seed=5))
    assert not np.array_equal(a.phi, c.phi)


def test_chains_do_not_depend_on_chain_count_without_ads(small_stack):
    spec = ModelSpec.of('edges')
    two = run_inference(small_stack, spec, None, NIWParams.default(1), _quick_config(chains=2, ads=False))
    three = run_inference(small_stack, spec, None, NIWParams.default(1), _quick_config(chains=3, ads=False))
    np.testing.assert_array_equal(two.phi, three.phi[:2])


def test_run_inference_validates_inputs(small_stack, small_network):
    with pytest.raises(ConfigError):
        run_inference(small_stack, ModelSpec.of('edges'), None, NIWParams.default(2), _quick_config())
    with pytest.raises(NetworkError):
        run_inference(small_network, ModelSpec.of('edges'), None, NIWParams.default(1), _quick_config())


def _exact_edges_posterior(n_edges, n_dyads, prior):
    """Densité a posteriori de phi pour une couche à dyades indépendantes, a priori NIW marginalisé"""
    grid = np.linspace(-8, 8, 8001)
    scale = math.sqrt(prior.scale[0, 0] * (prior.kappa + 1) / (prior.kappa * prior.nu))
    log_post = (n_edges * grid - n_dyads * np.logaddexp(0, grid)
                + stats.t.logpdf(grid, df=prior.nu, loc=prior.mu[0], scale=scale))
    density = np.exp(log_post - log_post.max())
    cdf = cumulative_trapezoid(density, grid, initial=0)
    return grid, cdf / cdf[-1]


@pytest.mark.slow
@pytest.mark.parametrize("ads", [False, True], ids=["random_walk", "ads"])
def test_exchange_matches_exact_bernoulli_posterior(ads):
    layer = BinaryLayer(6, [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (4, 5), (1, 5), (0, 4)])
    observed = LayerStack([layer])
    prior = NIWParams.default(1)
    cfg = RunConfig(chains=4, iterations=3000, burn_in=0.2, thinning=1, steps_per_edge=10,
                    ads=ads, proposal_sigma=1.0, seed=17)
    sample = run_inference(observed, ModelSpec.of('edges'), None, prior, cfg)
    draws = np.sort(sample.phi[..., 0, 0].ravel())
    assert draws.size >= 9600

    grid, cdf_grid = _exact_edges_posterior(layer.n_edges, 15, prior)
    cdf = np.interp(draws, grid, cdf_grid)
    n = draws.size
    ecdf = np.arange(1, n + 1) / n
    ks = max(np.max(ecdf - cdf), np.max(cdf - (ecdf - 1 / n)))
    assert ks < 0.05


def _mu_in_credible_region(mus, truth, level=0.95):
    """Région de crédibilité elliptique contenant la proportion level des tirages de mu"""
    center = mus.mean(axis=0)
    precision = np.linalg.inv(np.cov(mus, rowvar=False))
    spread = np.einsum('ij,jk,ik->i', mus - center, precision, mus - center)
    offset = np.asarray(truth) - center
    return offset @ precision @ offset <= np.quantile(spread, level)


def _recovery_coverage(mu, sigma, seeds):
    spec = ModelSpec.of('edges', 'gwesp')
    covered = 0
    for seed in seeds:
        rng = np.random.default_rng(seed)
        phis = draw_layer_params(mu, sigma, 3, rng)
        observed = simulate_stack(phis, spec, None, 50, 3, SimControl(steps_per_edge=20), rng)
        cfg = RunConfig(chains=4, iterations=500, burn_in=0.5, thinning=1, steps_per_edge=3, seed=seed)
        sample = run_inference(observed, spec, None, NIWParams.default(2), cfg)
        mus, _ = sample.flat_hyper()
        covered += bool(_mu_in_credible_region(mus, mu))
    return covered


def test_credible_region_contains_center():
    mus = np.random.default_rng(3).multivariate_normal([1.0, -1.0], np.diag([1.0, 0.25]), size=4000)
    assert _mu_in_credible_region(mus, [1.0, -1.0])
    assert not _mu_in_credible_region(mus, [5.0, -1.0])


@pytest.mark.slow
def test_recovers_null_trends():
    assert _recovery_coverage([0.0, 0.0], np.diag([2.0, 1.0]), seeds=range(100, 120)) >= 18


@pytest.mark.slow
def test_recovers_negative_density_positive_transitivity():
    assert _recovery_coverage([-2.0, 0.5], np.diag([2.0, 0.5]), seeds=range(200, 220)) >= 18


@pytest.fixture
def karate_reference():
    """
    Moyennes et écarts-types publiés de phi_w pour le club de karaté
    (couches en lignes; edges, gwesp, gwnsp, nodematch en colonnes)
    """
    means = np.array([[-3.96, 0.53, 0.17, 1.29],
                      [0.27, 0.53, -0.18, 0.56],
                      [-1.09, 0.51, 0.06, 0.21]])
    sds = np.array([[0.27, 0.14, 0.02, 0.27],
                    [0.68, 0.24, 0.09, 0.43],
                    [0.63, 0.25, 0.17, 0.52]])
    return means, sds


@pytest.mark.slow
def test_karate_club_matches_published_estimates(karate_reference):
    fit = load_config(CONFIG_DIR / 'karate.json')
    raw, attrs = load_karate()
    network = ordinalize(raw.weights, fit.data.thresholds)
    observed = decompose(network, 3)
    assert observed.edge_counts == [78, 48, 21]
    cfg = RunConfig(chains=6, iterations=1500, burn_in=0.5, thinning=5, steps_per_edge=5, seed=7)
    sample = run_inference(observed, fit.model, attrs, fit.prior, cfg)
    means = sample.flat_phi().mean(axis=0)

    reference, sds = karate_reference
    clear_sign = np.abs(reference) >= 2 * sds
    np.testing.assert_array_equal(np.sign(means[clear_sign]), np.sign(reference[clear_sign]))
    within = np.abs(means - reference) <= 3 * sds
    assert within.mean() >= 0.8

    report = posterior_predictive_gof(sample.flat_phi(), fit.model, attrs, network, 50,
                                      SimControl(steps_per_edge=10), np.random.default_rng(8))
    assert report.coverage >= 0.8


@pytest.mark.slow
def test_office_network_first_layer_is_sparse(office_data):
    fit = load_config(CONFIG_DIR / 'office.json')
    network = ordinalize(read_raw_edgelist(office_data), fit.data.thresholds)
    observed = decompose(network, 3)
    assert observed.edge_counts == [123, 44, 15]
    cfg = RunConfig(chains=4, iterations=1500, burn_in=0.5, thinning=5, steps_per_edge=5, seed=9)
    sample = run_inference(observed, fit.model, None, fit.prior, cfg)
    means = sample.flat_phi().mean(axis=0)
    # couche 1 publiée: edges -2.94, gwdegree 1.17, gwesp 0.56
    assert means[0, 0] < 0
    assert sample.flat_hyper()[0].mean(axis=0)[0] < 0
