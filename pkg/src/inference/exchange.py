"""
Échantillonneur a posteriori du modèle ERGM multicouche hiérarchique.

Chaque itération met à jour, chaîne par chaîne, les paramètres phi_1..phi_W
par l'algorithme d'échange approché (réseau auxiliaire simulé au paramètre
proposé), puis tire (mu, Sigma) dans leur loi conditionnelle complète NIW.
Les propositions ADS lisent l'état des autres chaînes tel qu'il était au
début de l'itération.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from ..config import ACCEPTANCE_BAND
from ..core.network import LayerStack, NodeAttributes
from ..core.simulation import simulate_layer
from ..core.statistics import ModelSpec, transition_statistics
from ..errors import ConfigError, NetworkError, SpecError
from .niw import HyperState, NIWParams, initial_hyper, niw_full_conditional, sample_hyper
from .posterior import PosteriorSample
from .run_config import RunConfig

logger = logging.getLogger(__name__)


def choose_partner_chains(h: int, n_chains: int, rng: np.random.Generator) -> Tuple[int, int]:
    """Deux chaînes distinctes, différentes de h, tirées uniformément"""
    if n_chains < 3:
        raise ConfigError(f"La proposition ADS nécessite au moins 3 chaînes, reçu {n_chains}")
    others = [c for c in range(n_chains) if c != h]
    h1, h2 = rng.choice(len(others), size=2, replace=False)
    return others[h1], others[h2]


def ads_propose(phi_h, phi_h1, phi_h2, gamma: float, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """
    phi' = phi_h + gamma (phi_h1 - phi_h2) + eps, eps ~ N(0, sigma^2 I)
    """
    phi_h = np.asarray(phi_h, dtype=float)
    step = gamma * (np.asarray(phi_h1, dtype=float) - np.asarray(phi_h2, dtype=float))
    return phi_h + step + sigma * rng.standard_normal(phi_h.shape)


def ads_log_density(target, phi_h, phi_h1, phi_h2, gamma: float, sigma: float) -> float:
    """log h(target | phi_h) pour des chaînes partenaires fixées"""
    mean = np.asarray(phi_h, dtype=float) + gamma * (np.asarray(phi_h1) - np.asarray(phi_h2))
    resid = np.asarray(target, dtype=float) - mean
    r = resid.size
    return float(-0.5 * resid @ resid / sigma ** 2 - r * math.log(sigma) - 0.5 * r * math.log(2 * math.pi))


@dataclass
class ChainState:
    phis: np.ndarray
    hyper: HyperState
    iteration: int = 0
    proposed: np.ndarray = None
    accepted: np.ndarray = None
    rejected_nonfinite: int = 0

    def __post_init__(self):
        self.phis = np.array(self.phis, dtype=float)
        if self.phis.ndim != 2 or self.phis.shape[0] < 1:
            raise SpecError(f"phis doit être de forme (W, r) avec W >= 1, reçu {self.phis.shape}")
        if self.phis.shape[1] != self.hyper.mu.size:
            raise SpecError("Dimension des phis incohérente avec l'hyper-état")
        n_layers = self.phis.shape[0]
        if self.proposed is None:
            self.proposed = np.zeros(n_layers, dtype=np.int64)
        if self.accepted is None:
            self.accepted = np.zeros(n_layers, dtype=np.int64)


def observed_transition_statistics(observed: LayerStack, spec: ModelSpec, attrs: NodeAttributes = None) -> np.ndarray:
    """s(y_w; y_{w-1}) pour chaque couche observée, (W, r)"""
    return np.array([
        transition_statistics(observed.layer(w), observed.conditioning_layer(w), spec, attrs)
        for w in range(1, observed.n_layers + 1)
    ])


def exchange_update_layer(
    w: int,
    h: int,
    snapshot: np.ndarray,
    chain: ChainState,
    spec: ModelSpec,
    attrs: NodeAttributes,
    observed: LayerStack,
    cfg: RunConfig,
    rng: np.random.Generator,
    observed_stats: np.ndarray = None,
    proposal: np.ndarray = None
) -> Tuple[np.ndarray, bool]:
    """
    Une mise à jour d'échange pour phi_w de la chaîne h. snapshot contient les
    phi de toutes les chaînes au début de l'itération, (H, W, r). Retourne le
    nouveau phi_w et l'indicateur d'acceptation.
    """
    current = chain.phis[w - 1]
    hyper = chain.hyper
    lower = observed.conditioning_layer(w)

    # Vraisemblance constante en phi_w: tirage direct dans N(mu, Sigma)
    if lower.n_edges == 0:
        return hyper.draw(rng), True

    if proposal is None:
        if cfg.ads:
            h1, h2 = choose_partner_chains(h, snapshot.shape[0], rng)
            proposal = ads_propose(current, snapshot[h1, w - 1], snapshot[h2, w - 1],
                                   cfg.ads_gamma, cfg.ads_sigma, rng)
        else:
            proposal = ads_propose(current, current, current, 0.0, cfg.proposal_sigma, rng)

    if observed_stats is None:
        s_obs = transition_statistics(observed.layer(w), lower, spec, attrs)
    else:
        s_obs = observed_stats[w - 1]

    aux = simulate_layer(lower, proposal, spec, attrs, cfg.sim_control(), rng)
    s_aux = transition_statistics(aux, lower, spec, attrs)

    log_ratio = (float((current - proposal) @ (s_aux - s_obs))
                 + hyper.log_density(proposal) - hyper.log_density(current))
    if not math.isfinite(log_ratio):
        chain.rejected_nonfinite += 1
        logger.warning("Rapport d'échange non fini (chaîne %d, couche %d): proposition rejetée", h, w)
        return current.copy(), False
    accept = log_ratio >= 0 or rng.random() < math.exp(log_ratio)
    return (proposal if accept else current.copy()), accept


def gibbs_update_hyper(chain: ChainState, prior: NIWParams, rng: np.random.Generator) -> HyperState:
    chain.hyper = sample_hyper(niw_full_conditional(prior, chain.phis), rng)
    return chain.hyper


def init_chains(n_layers: int, prior: NIWParams, cfg: RunConfig, rngs: Sequence[np.random.Generator],
                init_phi: np.ndarray = None) -> List[ChainState]:
    r = prior.dimension
    base = np.zeros((n_layers, r)) if init_phi is None else np.asarray(init_phi, dtype=float).reshape(n_layers, r)
    chains = []
    for rng in rngs:
        phis = base + cfg.init_jitter * rng.standard_normal((n_layers, r))
        chains.append(ChainState(phis=phis, hyper=initial_hyper(prior)))
    return chains


def run_inference(
    observed: LayerStack,
    spec: ModelSpec,
    attrs: NodeAttributes,
    prior: NIWParams,
    cfg: RunConfig,
    init_phi: np.ndarray = None,
    progress: bool = False
) -> PosteriorSample:
    """
    Échantillonnage de p(phi_1..phi_W, mu, Sigma | y_{W}): mises à jour
    d'échange couche par couche puis Gibbs NIW, pour chaque chaîne
    """
    if not isinstance(observed, LayerStack):
        raise NetworkError("Les données observées doivent être un LayerStack")
    spec.check_attributes(attrs)
    if prior.dimension != spec.dimension:
        raise ConfigError(f"Loi a priori de dimension {prior.dimension} pour {spec.dimension} statistiques")

    n_layers, r = observed.n_layers, spec.dimension
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(cfg.seed).spawn(cfg.chains)]
    chains = init_chains(n_layers, prior, cfg, rngs, init_phi)
    s_obs = observed_transition_statistics(observed, spec, attrs)

    kept = cfg.kept_iterations()
    phi_out = np.empty((cfg.chains, kept.size, n_layers, r))
    mu_out = np.empty((cfg.chains, kept.size, r))
    sigma_out = np.empty((cfg.chains, kept.size, r, r))
    slot = {int(t): k for k, t in enumerate(kept)}

    logger.info("Échantillonnage: %d chaînes, %d itérations, %d couches, r = %d, E = %s",
                cfg.chains, cfg.iterations, n_layers, r, observed.edge_counts)
    for t in tqdm(range(cfg.iterations), disable=not progress, desc="MCMC"):
        snapshot = np.stack([c.phis.copy() for c in chains])
        for h, (chain, rng) in enumerate(zip(chains, rngs)):
            for w in range(1, n_layers + 1):
                new_phi, accepted = exchange_update_layer(
                    w, h, snapshot, chain, spec, attrs, observed, cfg, rng, observed_stats=s_obs)
                chain.phis[w - 1] = new_phi
                chain.proposed[w - 1] += 1
                chain.accepted[w - 1] += int(accepted)
            gibbs_update_hyper(chain, prior, rng)
            chain.iteration = t + 1
            if t in slot:
                k = slot[t]
                phi_out[h, k] = chain.phis
                mu_out[h, k] = chain.hyper.mu
                sigma_out[h, k] = chain.hyper.sigma

    sample = PosteriorSample(
        phi=phi_out, mu=mu_out, sigma=sigma_out, iterations=kept, labels=spec.labels,
        proposed=np.stack([c.proposed for c in chains]),
        accepted=np.stack([c.accepted for c in chains]),
        rejected_nonfinite=sum(c.rejected_nonfinite for c in chains),
    )
    _report_acceptance(sample)
    return sample


def _report_acceptance(sample: PosteriorSample) -> None:
    rates = sample.acceptance_rates()
    low, high = ACCEPTANCE_BAND
    for w in range(sample.n_layers):
        layer_rates = rates[:, w]
        mean_rate = float(np.nanmean(layer_rates)) if np.any(~np.isnan(layer_rates)) else float('nan')
        logger.info("Couche %d: taux d'acceptation moyen %.3f", w + 1, mean_rate)
        if math.isfinite(mean_rate) and not low <= mean_rate <= high:
            logger.info("Couche %d: taux hors de la plage indicative [%.2f, %.2f], ajuster ads_gamma/ads_sigma",
                        w + 1, low, high)
    if sample.rejected_nonfinite:
        logger.warning("%d proposition(s) rejetée(s) pour rapport non fini", sample.rejected_nonfinite)
