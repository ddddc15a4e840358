"""
Adéquation a posteriori par la distribution des degrés pondérés.

Pour chaque réplique, un vecteur (phi_1..phi_W) est tiré uniformément parmi
les tirages conservés, un empilement de couches est simulé puis recomposé,
et les degrés pondérés de tous les nœuds sont enregistrés. L'enveloppe
est formée des quantiles nœud par nœud sur les répliques.
"""
import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from ..config import GOF_QUANTILES
from ..errors import ConfigError, NetworkError, SpecError
from .network import NodeAttributes, WeightedNetwork, recompose
from .simulation import SimControl, simulate_stack
from .statistics import ModelSpec

logger = logging.getLogger(__name__)


def weighted_degree(y: WeightedNetwork, node: int) -> int:
    """Somme des poids des arêtes incidentes au nœud"""
    if not 0 <= node < y.n_nodes:
        raise NetworkError(f"Nœud {node} hors de [0, {y.n_nodes})")
    return int(y.weights[node].sum(dtype=np.int64))


def weighted_degrees(y: WeightedNetwork) -> np.ndarray:
    return y.weights.sum(axis=1, dtype=np.int64)


def envelope_coverage(observed, simulated, lower: float, upper: float) -> float:
    """
    Fraction des nœuds dont la valeur observée est dans l'intervalle des
    quantiles [lower, upper] des répliques simulées
    """
    if not 0.0 <= lower <= upper <= 1.0:
        raise ConfigError(f"Bande de quantiles invalide [{lower}, {upper}]")
    simulated = np.asarray(simulated, dtype=float)
    lo = np.quantile(simulated, lower, axis=0)
    hi = np.quantile(simulated, upper, axis=0)
    observed = np.asarray(observed, dtype=float)
    return float(np.mean((observed >= lo) & (observed <= hi)))


@dataclass
class GofReport:
    observed: np.ndarray
    simulated: np.ndarray
    quantile_levels: Tuple[float, ...] = GOF_QUANTILES

    def __post_init__(self):
        self.observed = np.asarray(self.observed)
        self.simulated = np.atleast_2d(np.asarray(self.simulated))
        if self.simulated.shape[0] < 1:
            raise ConfigError("Au moins une réplique est requise")
        if self.simulated.shape[1] != self.observed.size:
            raise NetworkError("Les répliques n'ont pas le même nombre de nœuds que le réseau observé")
        levels = tuple(float(q) for q in self.quantile_levels)
        if not levels or list(levels) != sorted(levels):
            raise ConfigError("Les niveaux de quantiles doivent être croissants")
        self.quantile_levels = levels

    @property
    def n_replicates(self) -> int:
        return self.simulated.shape[0]

    @property
    def n_nodes(self) -> int:
        return self.observed.size

    def envelope(self) -> np.ndarray:
        """Quantiles par nœud, (nombre de niveaux, N)"""
        return np.quantile(self.simulated.astype(float), self.quantile_levels, axis=0)

    @property
    def coverage(self) -> float:
        """Couverture de la bande extrême (premier et dernier niveaux)"""
        return self.coverage_for(self.quantile_levels[0], self.quantile_levels[-1])

    def coverage_for(self, lower: float, upper: float) -> float:
        return envelope_coverage(self.observed, self.simulated, lower, upper)

    def envelope_frame(self) -> pd.DataFrame:
        """Une ligne par nœud et par quantile"""
        env = self.envelope()
        rows = []
        for q_index, level in enumerate(self.quantile_levels):
            for node in range(self.n_nodes):
                rows.append((node, level, float(env[q_index, node]), int(self.observed[node])))
        frame = pd.DataFrame(rows, columns=['node', 'quantile', 'value', 'observed'])
        return frame.sort_values(['node', 'quantile'], kind='mergesort').reset_index(drop=True)

    def long_frame(self) -> pd.DataFrame:
        """Format long pour les tracés: observé (replicate = -1) puis répliques"""
        nodes = np.arange(self.n_nodes)
        parts = [pd.DataFrame({'replicate': -1, 'node': nodes, 'weighted_degree': self.observed,
                               'source': 'observed'})]
        reps, node_idx = np.meshgrid(np.arange(self.n_replicates), nodes, indexing='ij')
        parts.append(pd.DataFrame({'replicate': reps.ravel(), 'node': node_idx.ravel(),
                                   'weighted_degree': self.simulated.ravel(), 'source': 'simulated'}))
        return pd.concat(parts, ignore_index=True)


def posterior_predictive_gof(
    phi_draws: np.ndarray,
    spec: ModelSpec,
    attrs: NodeAttributes,
    observed: WeightedNetwork,
    n_replicates: int,
    ctrl: SimControl = SimControl(),
    rng: np.random.Generator = None,
    quantile_levels: Sequence[float] = GOF_QUANTILES,
    progress: bool = False
) -> GofReport:
    """
    phi_draws: tirages a posteriori (D, W, r), par exemple PosteriorSample.flat_phi()
    """
    phi_draws = np.asarray(phi_draws, dtype=float)
    if phi_draws.ndim != 3 or phi_draws.shape[0] == 0:
        raise ConfigError("Au moins un tirage a posteriori (D, W, r) est requis")
    if phi_draws.shape[2] != spec.dimension:
        raise SpecError(f"Tirages de dimension {phi_draws.shape[2]} pour un modèle de dimension {spec.dimension}")
    if n_replicates < 1:
        raise ConfigError(f"Le nombre de répliques doit être >= 1, reçu {n_replicates}")
    n_layers = phi_draws.shape[1]
    if observed.max_weight > n_layers:
        raise NetworkError(f"Poids observé {observed.max_weight} supérieur au nombre de couches {n_layers}")
    if rng is None:
        rng = ctrl.rng()

    simulated = np.empty((n_replicates, observed.n_nodes), dtype=np.int64)
    for rep in tqdm(range(n_replicates), disable=not progress, desc="GOF"):
        draw = phi_draws[rng.integers(phi_draws.shape[0])]
        stack = simulate_stack(list(draw), spec, attrs, observed.n_nodes, n_layers, ctrl, rng)
        simulated[rep] = weighted_degrees(recompose(stack))

    report = GofReport(observed=weighted_degrees(observed), simulated=simulated,
                       quantile_levels=tuple(quantile_levels))
    logger.info("GOF: %d répliques, couverture %.1f %% de l'enveloppe [%.3f, %.3f]",
                n_replicates, 100 * report.coverage, report.quantile_levels[0], report.quantile_levels[-1])
    return report
