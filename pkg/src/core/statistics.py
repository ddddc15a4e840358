"""
Statistiques suffisantes des ERGM binaires et statistiques de changement.

Statistiques disponibles: edges, gwdegree, gwesp, gwnsp et nodematch. Les
paramètres de décroissance des statistiques géométriquement pondérées sont
des constantes du modèle (ln 2 par défaut) et ne sont jamais estimés.
"""
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np

from ..config import DEFAULT_DECAY, GW_KINDS, STATISTIC_KINDS
from ..errors import NetworkError, SpecError
from .network import BinaryLayer, Dyad, NodeAttributes


def gw_weight(d, alpha: float = DEFAULT_DECAY):
    """
    Poids géométrique g_d(alpha) = e^alpha {1 - (1 - e^-alpha)^d}; accepte
    un scalaire ou un tableau de comptes d
    """
    if alpha < 0:
        raise SpecError(f"La décroissance doit être positive ou nulle, reçu {alpha}")
    d_arr = np.asarray(d, dtype=float)
    if np.any(d_arr < 0):
        raise SpecError("Les comptes d doivent être positifs ou nuls")
    value = math.exp(alpha) * (1.0 - (1.0 - math.exp(-alpha)) ** d_arr)
    return float(value) if np.ndim(value) == 0 else value


@dataclass(frozen=True)
class StatisticDescriptor:
    kind: str
    decay: Optional[float] = None
    attribute: Optional[str] = None

    def __post_init__(self):
        if self.kind not in STATISTIC_KINDS:
            raise SpecError(f"Statistique inconnue '{self.kind}', attendu une de {list(STATISTIC_KINDS)}")
        if self.kind in GW_KINDS:
            if self.decay is None:
                object.__setattr__(self, 'decay', DEFAULT_DECAY)
            elif not (math.isfinite(self.decay) and self.decay >= 0):
                raise SpecError(f"{self.kind}: la décroissance doit être finie et >= 0, reçu {self.decay}")
        elif self.decay is not None:
            raise SpecError(f"{self.kind}: pas de paramètre de décroissance")
        if self.kind == 'nodematch':
            if not self.attribute:
                raise SpecError("nodematch: un attribut nodal est requis")
        elif self.attribute is not None:
            raise SpecError(f"{self.kind}: pas d'attribut nodal")

    @property
    def label(self) -> str:
        if self.kind == 'nodematch':
            return f"nodematch.{self.attribute}"
        return self.kind

    @classmethod
    def from_dict(cls, entry: Mapping, path: str = "model") -> "StatisticDescriptor":
        if not isinstance(entry, Mapping):
            raise SpecError(f"{path}: objet attendu, reçu {type(entry).__name__}")
        unknown = set(entry) - {'kind', 'decay', 'attribute'}
        if unknown:
            raise SpecError(f"{path}: clés inconnues {sorted(unknown)}")
        if 'kind' not in entry:
            raise SpecError(f"{path}.kind: champ requis")
        decay = entry.get('decay')
        if decay is not None and not isinstance(decay, (int, float)):
            raise SpecError(f"{path}.decay: nombre attendu")
        try:
            return cls(kind=entry['kind'],
                       decay=None if decay is None else float(decay),
                       attribute=entry.get('attribute'))
        except SpecError as exc:
            raise SpecError(f"{path}: {exc}") from None

    def to_dict(self) -> dict:
        out = {'kind': self.kind}
        if self.decay is not None:
            out['decay'] = self.decay
        if self.attribute is not None:
            out['attribute'] = self.attribute
        return out


@dataclass(frozen=True)
class ModelSpec:
    terms: Tuple[StatisticDescriptor, ...] = field(default_factory=tuple)

    def __post_init__(self):
        terms = tuple(self.terms)
        object.__setattr__(self, 'terms', terms)
        if not terms:
            raise SpecError("Le modèle doit contenir au moins une statistique")
        if len(set(terms)) != len(terms):
            raise SpecError("Les statistiques du modèle doivent être uniques")

    @classmethod
    def of(cls, *kinds: str, decay: float = DEFAULT_DECAY, attribute: str = None) -> "ModelSpec":
        """Raccourci: ModelSpec.of('edges', 'gwesp')"""
        terms = []
        for kind in kinds:
            terms.append(StatisticDescriptor(
                kind,
                decay=decay if kind in GW_KINDS else None,
                attribute=attribute if kind == 'nodematch' else None,
            ))
        return cls(tuple(terms))

    @classmethod
    def from_list(cls, entries: Sequence[Mapping], path: str = "model") -> "ModelSpec":
        if not isinstance(entries, Sequence) or isinstance(entries, (str, bytes)):
            raise SpecError(f"{path}: liste de statistiques attendue")
        return cls(tuple(StatisticDescriptor.from_dict(e, f"{path}[{k}]") for k, e in enumerate(entries)))

    def to_list(self) -> list:
        return [term.to_dict() for term in self.terms]

    @property
    def dimension(self) -> int:
        return len(self.terms)

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(term.label for term in self.terms)

    @property
    def needs_shared_partners(self) -> bool:
        return any(t.kind in ('gwesp', 'gwnsp') for t in self.terms)

    def check_attributes(self, attrs: Optional[NodeAttributes]) -> None:
        for term in self.terms:
            if term.kind == 'nodematch' and (attrs is None or term.attribute not in attrs):
                raise SpecError(f"nodematch: attribut nodal '{term.attribute}' introuvable")


def _gw_tables(alpha: float, n_nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    g = gw_weight(np.arange(n_nodes + 1), alpha)
    return g, np.diff(g)


def eval_statistics(layer: BinaryLayer, spec: ModelSpec, attrs: NodeAttributes = None) -> np.ndarray:
    """
    Évalue le vecteur s(y) des r statistiques du modèle sur une couche
    """
    spec.check_attributes(attrs)
    adj = layer.adjacency()
    n = layer.n_nodes
    iu = np.triu_indices(n, 1)
    upper_edges = adj[iu]
    shared = None
    if spec.needs_shared_partners:
        a = adj.astype(np.int64)
        shared = (a @ a)[iu]

    out = np.zeros(spec.dimension)
    for k, term in enumerate(spec.terms):
        if term.kind == 'edges':
            out[k] = upper_edges.sum()
        elif term.kind == 'nodematch':
            codes = attrs.codes(term.attribute)
            out[k] = (upper_edges & (codes[iu[0]] == codes[iu[1]])).sum()
        else:
            g, _ = _gw_tables(term.decay, n)
            if term.kind == 'gwdegree':
                out[k] = g[adj.sum(axis=1)].sum()
            elif term.kind == 'gwesp':
                out[k] = g[shared[upper_edges]].sum()
            else:
                out[k] = g[shared[~upper_edges]].sum()
    return out


class IncrementalLayerState:
    """
    État mutable d'une couche pour les mises à jour incrémentales: matrice
    d'adjacence, degrés et nombres de partenaires partagés. Propriété d'une
    seule chaîne, jamais partagé.
    """

    def __init__(self, layer: BinaryLayer, spec: ModelSpec, attrs: NodeAttributes = None):
        spec.check_attributes(attrs)
        self.spec = spec
        n = layer.n_nodes
        self.n_nodes = n
        self.adj = np.array(layer.adjacency(), dtype=bool)
        self.degree = self.adj.sum(axis=1).astype(np.int64)
        self.track_shared = spec.needs_shared_partners
        if self.track_shared:
            a = self.adj.astype(np.int64)
            self.shared = a @ a
            np.fill_diagonal(self.shared, 0)
        else:
            self.shared = None

        # Une entrée par statistique: (genre, g, dg, codes)
        self._terms = []
        for term in spec.terms:
            g = dg = codes = None
            if term.kind in GW_KINDS:
                g, dg = _gw_tables(term.decay, n)
            if term.kind == 'nodematch':
                codes = attrs.codes(term.attribute)
            self._terms.append((term.kind, g, dg, codes))

    def change(self, i: int, j: int) -> np.ndarray:
        """Statistiques de changement pour le passage 0 -> 1 de (i, j)"""
        adj = self.adj
        if adj[i, j]:
            raise NetworkError(f"La dyade ({i}, {j}) est déjà présente")
        out = np.empty(len(self._terms))
        for k, (kind, g, dg, codes) in enumerate(self._terms):
            if kind == 'edges':
                out[k] = 1.0
            elif kind == 'nodematch':
                out[k] = 1.0 if codes[i] == codes[j] else 0.0
            elif kind == 'gwdegree':
                out[k] = dg[self.degree[i]] + dg[self.degree[j]]
            elif kind == 'gwesp':
                common = adj[i] & adj[j]
                sp = self.shared
                out[k] = g[sp[i, j]] + dg[sp[i, common]].sum() + dg[sp[j, common]].sum()
            else:
                sp = self.shared
                # paires non connectées (i, k) avec k voisin de j, et (j, k) avec k voisin de i
                only_j = adj[j] & ~adj[i]
                only_i = adj[i] & ~adj[j]
                out[k] = -g[sp[i, j]] + dg[sp[i, only_j]].sum() + dg[sp[j, only_i]].sum()
        return out

    def add(self, i: int, j: int) -> None:
        if self.track_shared:
            row_i = self.adj[i].astype(np.int64)
            row_j = self.adj[j].astype(np.int64)
            self.shared[i, :] += row_j
            self.shared[:, i] += row_j
            self.shared[j, :] += row_i
            self.shared[:, j] += row_i
        self.adj[i, j] = self.adj[j, i] = True
        self.degree[i] += 1
        self.degree[j] += 1

    def remove(self, i: int, j: int) -> None:
        self.adj[i, j] = self.adj[j, i] = False
        self.degree[i] -= 1
        self.degree[j] -= 1
        if self.track_shared:
            row_i = self.adj[i].astype(np.int64)
            row_j = self.adj[j].astype(np.int64)
            self.shared[i, :] -= row_j
            self.shared[:, i] -= row_j
            self.shared[j, :] -= row_i
            self.shared[:, j] -= row_i

    def to_layer(self) -> BinaryLayer:
        return BinaryLayer.from_adjacency(self.adj)


def change_statistics(
    layer: BinaryLayer,
    dyad: Dyad,
    spec: ModelSpec,
    attrs: NodeAttributes = None,
    brute_force: bool = False
) -> np.ndarray:
    """
    Vecteur Δ: variation de s(·) quand la dyade passe de 0 à 1, le reste de
    la couche étant fixé. brute_force=True réévalue s(y+) - s(y-) (oracle).
    """
    i, j = int(dyad[0]), int(dyad[1])
    if i == j or not (0 <= i < layer.n_nodes and 0 <= j < layer.n_nodes):
        raise NetworkError(f"Dyade ({i}, {j}) invalide pour {layer.n_nodes} nœuds")
    if (i, j) in layer:
        raise NetworkError(f"La dyade ({i}, {j}) est déjà présente (changement défini pour 0 -> 1)")
    if brute_force:
        return eval_statistics(layer.with_edge((i, j)), spec, attrs) - eval_statistics(layer, spec, attrs)
    return IncrementalLayerState(layer, spec, attrs).change(i, j)


def transition_statistics(
    upper: BinaryLayer,
    lower: BinaryLayer,
    spec: ModelSpec,
    attrs: NodeAttributes = None
) -> np.ndarray:
    """
    s(y_{w+1}; y_w): configurations présentes dans les deux couches. Comme la
    couche supérieure est incluse dans l'inférieure, l'intersection est la
    couche supérieure elle-même.
    """
    if upper.n_nodes != lower.n_nodes:
        raise NetworkError(f"Couches de tailles différentes: {upper.n_nodes} et {lower.n_nodes} nœuds")
    both = BinaryLayer.from_adjacency(upper.adjacency() & lower.adjacency())
    if both != upper:
        missing = sorted(upper.edges - both.edges)[:3]
        raise NetworkError("Emboîtement violé: la couche supérieure n'est pas incluse dans l'inférieure, "
                           f"par exemple {missing}")
    return eval_statistics(both, spec, attrs)
