"""
Simulation MCMC contrainte d'une couche conditionnellement à la couche
inférieure, et simulation générative complète d'un réseau multicouche.

Seules les arêtes de la couche inférieure peuvent être présentes dans la
couche supérieure (zéros structurels). La chaîne part de la couche
inférieure et applique I = c * E_inf pas de Metropolis-Hastings avec la
proposition tie-no-tie restreinte à l'ensemble des dyades libres.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..config import MAX_WEIGHT, SIM_BURN_IN, STEPS_PER_EDGE
from ..errors import ConfigError, NetworkError, SpecError
from .network import BinaryLayer, Dyad, LayerStack, NodeAttributes, WeightedNetwork, recompose
from .statistics import IncrementalLayerState, ModelSpec, change_statistics, transition_statistics

logger = logging.getLogger(__name__)

# Nombre de tirages uniformes générés d'un coup par la chaîne
_UNIFORM_BLOCK = 4096


@dataclass(frozen=True)
class SimControl:
    steps_per_edge: int = STEPS_PER_EDGE
    seed: Optional[int] = None
    burn_in: float = SIM_BURN_IN
    cold_start: bool = False

    def __post_init__(self):
        if int(self.steps_per_edge) != self.steps_per_edge or self.steps_per_edge < 1:
            raise ConfigError(f"steps_per_edge doit être un entier >= 1, reçu {self.steps_per_edge}")
        if not 0.0 <= self.burn_in < 1.0:
            raise ConfigError(f"burn_in doit être dans [0, 1), reçu {self.burn_in}")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


def check_params(phi, dimension: int) -> np.ndarray:
    """Vecteur de paramètres de couche phi_w (r réels finis)"""
    arr = np.asarray(phi, dtype=float).reshape(-1)
    if arr.shape != (dimension,):
        raise SpecError(f"Vecteur de paramètres de dimension {arr.size}, attendu {dimension}")
    if not np.all(np.isfinite(arr)):
        raise SpecError(f"Paramètres non finis: {arr.tolist()}")
    return arr


class _IndexedSet:
    """Ensemble de dyades avec tirage uniforme et retrait en O(1)"""

    def __init__(self, items: Sequence[Dyad]):
        self.items: List[Dyad] = list(items)
        self.position = {item: k for k, item in enumerate(self.items)}

    def __len__(self) -> int:
        return len(self.items)

    def pick(self, u: float) -> Dyad:
        return self.items[min(int(u * len(self.items)), len(self.items) - 1)]

    def add(self, item: Dyad) -> None:
        self.position[item] = len(self.items)
        self.items.append(item)

    def discard(self, item: Dyad) -> None:
        k = self.position.pop(item)
        last = self.items.pop()
        if k < len(self.items):
            self.items[k] = last
            self.position[last] = k


def _log_move_probability(n_from: int, n_other: int) -> float:
    """
    log de la probabilité de proposer une dyade donnée dans un ensemble de
    taille n_from, l'autre ensemble ayant n_other éléments
    """
    mass = 0.5 if (n_from > 0 and n_other > 0) else 1.0
    return math.log(mass) - math.log(n_from)


class ConstrainedLayerChain:
    """
    Chaîne tie-no-tie sur les dyades libres de la couche inférieure
    """

    def __init__(self, lower: BinaryLayer, phi, spec: ModelSpec, attrs: NodeAttributes,
                 rng: np.random.Generator, cold_start: bool = False):
        self.phi = check_params(phi, spec.dimension)
        self.rng = rng
        start = BinaryLayer.empty(lower.n_nodes) if cold_start else lower
        self.state = IncrementalLayerState(start, spec, attrs)
        present = start.sorted_edges()
        absent = sorted(lower.edges - start.edges)
        self.present = _IndexedSet(present)
        self.absent = _IndexedSet(absent)
        self.proposed = 0
        self.accepted = 0
        self._uniforms = np.empty((0, 3))
        self._cursor = 0

    def _next_uniforms(self) -> np.ndarray:
        if self._cursor >= len(self._uniforms):
            self._uniforms = self.rng.random((_UNIFORM_BLOCK, 3))
            self._cursor = 0
        row = self._uniforms[self._cursor]
        self._cursor += 1
        return row

    def step(self) -> bool:
        n_present, n_absent = len(self.present), len(self.absent)
        if n_present + n_absent == 0:
            return False
        u_set, u_pick, u_accept = self._next_uniforms()
        if n_absent == 0:
            add = False
        elif n_present == 0:
            add = True
        else:
            add = u_set < 0.5

        state = self.state
        if add:
            i, j = self.absent.pick(u_pick)
            delta = state.change(i, j)
            log_target = float(self.phi @ delta)
            log_fwd = _log_move_probability(n_absent, n_present)
            log_rev = _log_move_probability(n_present + 1, n_absent - 1)
        else:
            i, j = self.present.pick(u_pick)
            state.remove(i, j)
            delta = state.change(i, j)
            log_target = -float(self.phi @ delta)
            log_fwd = _log_move_probability(n_present, n_absent)
            log_rev = _log_move_probability(n_absent + 1, n_present - 1)

        self.proposed += 1
        log_ratio = log_target + log_rev - log_fwd
        accept = log_ratio >= 0 or u_accept < math.exp(log_ratio)
        if add:
            if accept:
                state.add(i, j)
                self.absent.discard((i, j))
                self.present.add((i, j))
        else:
            if accept:
                self.present.discard((i, j))
                self.absent.add((i, j))
            else:
                state.add(i, j)
        if accept:
            self.accepted += 1
        return accept

    def run(self, n_steps: int) -> None:
        for _ in range(n_steps):
            self.step()

    def layer(self) -> BinaryLayer:
        return BinaryLayer(self.state.n_nodes, self.present.items)


def simulate_layer(
    lower: BinaryLayer,
    phi,
    spec: ModelSpec,
    attrs: NodeAttributes = None,
    ctrl: SimControl = SimControl(),
    rng: np.random.Generator = None
) -> BinaryLayer:
    """
    Tire y_{w+1} ~ p(· | phi, y_w) par I = c * E_w pas tie-no-tie contraints
    """
    phi = check_params(phi, spec.dimension)
    spec.check_attributes(attrs)
    if lower.n_edges == 0:
        return BinaryLayer.empty(lower.n_nodes)
    if rng is None:
        rng = ctrl.rng()
    chain = ConstrainedLayerChain(lower, phi, spec, attrs, rng, cold_start=ctrl.cold_start)
    chain.run(ctrl.steps_per_edge * lower.n_edges)
    return chain.layer()


def sample_layer_chain(
    lower: BinaryLayer,
    phi,
    spec: ModelSpec,
    attrs: NodeAttributes = None,
    n_draws: int = 1,
    ctrl: SimControl = SimControl(),
    rng: np.random.Generator = None
) -> List[BinaryLayer]:
    """
    Une longue chaîne: burn_in * n_draws * I pas écartés puis un état
    enregistré tous les I pas
    """
    phi = check_params(phi, spec.dimension)
    if n_draws < 1:
        raise ConfigError(f"n_draws doit être >= 1, reçu {n_draws}")
    if lower.n_edges == 0:
        return [BinaryLayer.empty(lower.n_nodes) for _ in range(n_draws)]
    if rng is None:
        rng = ctrl.rng()
    interval = ctrl.steps_per_edge * lower.n_edges
    chain = ConstrainedLayerChain(lower, phi, spec, attrs, rng, cold_start=ctrl.cold_start)
    chain.run(int(ctrl.burn_in * n_draws * interval))
    draws = []
    for _ in range(n_draws):
        chain.run(interval)
        draws.append(chain.layer())
    logger.debug("Chaîne contrainte: taux d'acceptation %.3f", chain.accepted / max(chain.proposed, 1))
    return draws


def simulate_stack(
    phi_list: Sequence,
    spec: ModelSpec,
    attrs: NodeAttributes,
    n_nodes: int,
    n_layers: int,
    ctrl: SimControl = SimControl(),
    rng: np.random.Generator = None
) -> LayerStack:
    """
    Simulation générative: la couche 1 est conditionnée sur le graphe complet,
    chaque couche suivante sur sa prédécesseure
    """
    if len(phi_list) != n_layers:
        raise SpecError(f"{len(phi_list)} vecteurs de paramètres pour {n_layers} couches")
    if not 1 <= n_layers <= MAX_WEIGHT:
        raise ConfigError(f"Le nombre de couches doit être dans [1, {MAX_WEIGHT}]")
    if rng is None:
        rng = ctrl.rng()
    lower = BinaryLayer.complete(n_nodes)
    layers = []
    for phi in phi_list:
        lower = simulate_layer(lower, phi, spec, attrs, ctrl, rng)
        layers.append(lower)
    return LayerStack(layers)


def simulate_weighted(phi_list, spec, attrs, n_nodes, n_layers, ctrl=SimControl(), rng=None) -> WeightedNetwork:
    return recompose(simulate_stack(phi_list, spec, attrs, n_nodes, n_layers, ctrl, rng))


def draw_layer_params(mu, sigma, n_layers: int, rng: np.random.Generator) -> np.ndarray:
    """phi_w ~ N(mu, Sigma) indépendants, tableau (W, r)"""
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    return rng.multivariate_normal(mu, sigma, size=n_layers)


def phi_from_theta(theta: float) -> float:
    """
    Paramètre de dissolution équivalent au modèle géométrique de référence:
    phi = ln(p) - ln(q) = theta - ln(1 - e^theta)
    """
    if not theta < 0:
        raise SpecError(f"theta doit être < 0 (p = e^theta < 1), reçu {theta}")
    return theta - math.log(-math.expm1(theta))


def theta_from_phi(phi: float) -> float:
    """Inverse logistique: p = e^phi / (1 + e^phi), theta = ln p"""
    return -math.log1p(math.exp(-phi)) if phi > -700 else phi


def geometric_reference_pmf(p: float, n_layers: int) -> np.ndarray:
    """
    Loi des poids d'une dyade dans le modèle géométrique de référence tronqué
    à W: P(Y=k) = p^k (1-p) pour k < W, P(Y=W) = p^W
    """
    if not 0.0 <= p <= 1.0:
        raise SpecError(f"p doit être dans [0, 1], reçu {p}")
    k = np.arange(n_layers + 1)
    pmf = p ** k * (1.0 - p)
    pmf[-1] = p ** n_layers
    return pmf


def weighted_edge_logodds(
    dyad: Dyad,
    target_weight: int,
    phi_list: Sequence,
    stack: LayerStack,
    spec: ModelSpec,
    attrs: NodeAttributes = None
) -> float:
    """
    Log-cote conditionnelle d'un poids w* contre 0 pour une dyade:
    somme sur w = 1..w* de phi_w' Δ(y)_{i,j,w}, le reste de chaque couche fixé
    """
    if not 1 <= target_weight <= stack.n_layers:
        raise NetworkError(f"Poids cible {target_weight} hors de [1, {stack.n_layers}]")
    if len(phi_list) < target_weight:
        raise SpecError(f"{len(phi_list)} vecteurs de paramètres pour un poids cible {target_weight}")
    total = 0.0
    for w in range(1, target_weight + 1):
        phi = check_params(phi_list[w - 1], spec.dimension)
        rest = stack.layer(w).without_edge(dyad)
        total += float(phi @ change_statistics(rest, dyad, spec, attrs))
    return total


def log_potential(stack: LayerStack, phi_list: Sequence, spec: ModelSpec, attrs: NodeAttributes = None) -> float:
    """Log-vraisemblance non normalisée: somme des phi_w' s(y_w; y_{w-1})"""
    if len(phi_list) != stack.n_layers:
        raise SpecError(f"{len(phi_list)} vecteurs de paramètres pour {stack.n_layers} couches")
    total = 0.0
    for w in range(1, stack.n_layers + 1):
        phi = check_params(phi_list[w - 1], spec.dimension)
        stats = transition_statistics(stack.layer(w), stack.conditioning_layer(w), spec, attrs)
        total += float(phi @ stats)
    return total
