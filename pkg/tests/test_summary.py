import numpy as np
import pytest

from src.errors import DataError
from src.inference.posterior import PosteriorSample
from src.utils.data_processing import effective_sample_size, gelman_rubin, summarize_posterior


def _sample_from(phi, labels=('edges',)):
    h, k, _, r = phi.shape
    sigma = np.broadcast_to(np.eye(r), (h, k, r, r)).copy()
    return PosteriorSample(phi=phi, mu=phi[:, :, 0, :].copy(), sigma=sigma, iterations=np.arange(k), labels=labels)


def test_constant_sample_has_zero_sd():
    sample = _sample_from(np.full((2, 50, 2, 1), 0.7))
    summary = summarize_posterior(sample)
    assert len(summary.layers) == 2
    np.testing.assert_allclose(summary.layers['mean'], 0.7)
    np.testing.assert_allclose(summary.layers['sd'], 0.0)
    np.testing.assert_allclose(summary.layers['q2.5'], 0.7)


def test_normal_sample_matches_generator(rng):
    phi = rng.normal(loc=-1.5, scale=0.4, size=(4, 5000, 1, 2))
    summary = summarize_posterior(_sample_from(phi, labels=('edges', 'gwesp')))
    row = summary.layers.iloc[0]
    assert row['label'] == 'edges'
    assert row['mean'] == pytest.approx(-1.5, abs=0.01)
    assert row['sd'] == pytest.approx(0.4, rel=0.02)
    assert row['q97.5'] == pytest.approx(-1.5 + 1.96 * 0.4, abs=0.03)
    assert row['ess'] == pytest.approx(20_000, rel=0.15)
    assert row['rhat'] == pytest.approx(1.0, abs=0.01)


def test_hyper_table_covers_upper_triangle(rng):
    summary = summarize_posterior(_sample_from(rng.normal(size=(2, 20, 3, 3)), labels=('a', 'b', 'c')))
    assert (summary.hyper['quantity'] == 'mu').sum() == 3
    assert (summary.hyper['quantity'] == 'sigma').sum() == 6
    text = summary.to_text()
    assert "Sigma[a,c]" in text
    assert "mu[b]" in text


def test_missing_hyper_draws_are_skipped(rng):
    sample = _sample_from(rng.normal(size=(2, 10, 1, 1)))
    sample.mu[:] = np.nan
    summary = summarize_posterior(sample)
    assert summary.hyper.empty
    assert "Hyper" not in summary.to_text()


def test_empty_sample_is_rejected():
    with pytest.raises(DataError):
        summarize_posterior(_sample_from(np.empty((2, 0, 1, 1))))


def test_ess_of_autocorrelated_chain_is_lower(rng):
    noise = rng.normal(size=(2, 4000))
    ar = np.zeros_like(noise)
    for t in range(1, noise.shape[1]):
        ar[:, t] = 0.9 * ar[:, t - 1] + noise[:, t]
    # AR(1) de coefficient 0.9: temps d'autocorrélation (1 + 0.9) / (1 - 0.9) = 19
    assert effective_sample_size(ar) == pytest.approx(8000 / 19, rel=0.35)
    assert effective_sample_size(noise) > 5 * effective_sample_size(ar)


def test_gelman_rubin_detects_separated_chains(rng):
    mixed = rng.normal(size=(3, 500))
    separated = mixed + np.array([[0.0], [5.0], [10.0]])
    assert gelman_rubin(mixed) == pytest.approx(1.0, abs=0.02)
    assert gelman_rubin(separated) > 2.0
    assert np.isnan(gelman_rubin(mixed[:1]))
    assert gelman_rubin(np.ones((2, 10))) == 1.0


def test_predictive_table_follows_hyper_draws(rng):
    h, k = 4, 2500
    sample = PosteriorSample(phi=np.zeros((h, k, 2, 1)), mu=np.full((h, k, 1), 2.0),
                             sigma=np.full((h, k, 1, 1), 0.25), iterations=np.arange(k), labels=('edges',))
    summary = summarize_posterior(sample, rng=rng)
    row = summary.predictive.iloc[0]
    assert row['label'] == 'edges'
    assert row['mean'] == pytest.approx(2.0, abs=0.03)
    assert row['sd'] == pytest.approx(0.5, rel=0.05)
    assert "phi*" in summary.to_text()
    assert summarize_posterior(sample).predictive.empty
