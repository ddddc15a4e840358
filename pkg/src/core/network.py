"""
Modèle de données des réseaux pondérés ordinaux et de leur décomposition
en couches binaires emboîtées.

Un réseau pondéré y sur N nœuds (poids 0..W) se décompose en W couches
binaires: la couche w contient la dyade (i, j) si et seulement si
y[i][j] >= w. Les couches sont emboîtées (E_1 ⊇ E_2 ⊇ ... ⊇ E_W) et la
recomposition compte, pour chaque dyade, le nombre de couches qui la
contiennent.
"""
import logging
from collections.abc import Mapping
from typing import Dict, Iterable, Iterator, List, Sequence, Tuple

import numpy as np

from ..config import MAX_WEIGHT
from ..errors import NetworkError

logger = logging.getLogger(__name__)

Dyad = Tuple[int, int]


def _canonical(i: int, j: int) -> Dyad:
    return (i, j) if i < j else (j, i)


class WeightedNetwork:
    """
    Réseau non orienté à poids entiers ordinaux, immuable après construction
    """

    def __init__(self, weights):
        arr = np.asarray(weights)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise NetworkError(f"La matrice des poids doit être carrée, reçu {arr.shape}")
        if arr.size and not np.all(np.isfinite(arr)):
            raise NetworkError("La matrice des poids contient des valeurs non finies")
        if arr.size and np.any(arr != np.round(arr)):
            raise NetworkError("Les poids doivent être entiers (utiliser ordinalize pour des poids réels)")
        if arr.size and arr.min() < 0:
            raise NetworkError("Les poids doivent être positifs ou nuls")
        if arr.size and arr.max() > MAX_WEIGHT:
            raise NetworkError(f"Poids maximal {int(arr.max())} supérieur à la borne {MAX_WEIGHT}")
        if not np.array_equal(arr, arr.T):
            raise NetworkError("La matrice des poids doit être symétrique (réseau non orienté)")
        if np.any(np.diag(arr) != 0):
            raise NetworkError("Les boucles (diagonale non nulle) ne sont pas autorisées")

        self._weights = arr.astype(np.uint8)
        self._weights.setflags(write=False)

    @classmethod
    def empty(cls, n_nodes: int) -> "WeightedNetwork":
        if n_nodes < 1:
            raise NetworkError(f"Le nombre de nœuds doit être positif, reçu {n_nodes}")
        return cls(np.zeros((n_nodes, n_nodes), dtype=np.uint8))

    @classmethod
    def from_edges(cls, n_nodes: int, edges: Iterable[Tuple[int, int, int]]) -> "WeightedNetwork":
        """
        Construit un réseau à partir de triplets (i, j, poids); les dyades
        absentes valent 0
        """
        if n_nodes < 1:
            raise NetworkError(f"Le nombre de nœuds doit être positif, reçu {n_nodes}")
        weights = np.zeros((n_nodes, n_nodes), dtype=np.int64)
        for i, j, w in edges:
            if not (0 <= i < n_nodes and 0 <= j < n_nodes):
                raise NetworkError(f"Dyade ({i}, {j}) hors de [0, {n_nodes})")
            if i == j:
                raise NetworkError(f"Boucle sur le nœud {i} non autorisée")
            weights[i, j] = weights[j, i] = w
        return cls(weights)

    @property
    def n_nodes(self) -> int:
        return self._weights.shape[0]

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def max_weight(self) -> int:
        return int(self._weights.max()) if self._weights.size else 0

    @property
    def n_dyads(self) -> int:
        return self.n_nodes * (self.n_nodes - 1) // 2

    def weight(self, i: int, j: int) -> int:
        return int(self._weights[i, j])

    def edges(self) -> List[Tuple[int, int, int]]:
        """Triplets (i, j, poids) des dyades non nulles, i < j, ordre canonique"""
        rows, cols = np.nonzero(np.triu(self._weights, 1))
        return [(int(i), int(j), int(self._weights[i, j])) for i, j in zip(rows, cols)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedNetwork):
            return NotImplemented
        return np.array_equal(self._weights, other._weights)

    def __hash__(self) -> int:
        return hash((self.n_nodes, self._weights.tobytes()))

    def __repr__(self) -> str:
        return f"WeightedNetwork(n_nodes={self.n_nodes}, edges={len(self.edges())}, max_weight={self.max_weight})"


class BinaryLayer:
    """
    Couche binaire: ensemble de paires non ordonnées sur N nœuds
    """

    __slots__ = ('_n_nodes', '_edges', '_adjacency')

    def __init__(self, n_nodes: int, edges: Iterable[Dyad] = ()):
        if n_nodes < 1:
            raise NetworkError(f"Le nombre de nœuds doit être positif, reçu {n_nodes}")
        normalized = set()
        for i, j in edges:
            i, j = int(i), int(j)
            if i == j:
                raise NetworkError(f"Boucle ({i}, {i}) non autorisée dans une couche")
            if not (0 <= i < n_nodes and 0 <= j < n_nodes):
                raise NetworkError(f"Dyade ({i}, {j}) hors de [0, {n_nodes})")
            normalized.add(_canonical(i, j))
        self._n_nodes = n_nodes
        self._edges = frozenset(normalized)
        self._adjacency = None

    @classmethod
    def empty(cls, n_nodes: int) -> "BinaryLayer":
        return cls(n_nodes)

    @classmethod
    def complete(cls, n_nodes: int) -> "BinaryLayer":
        """Graphe complet y_0, couche de conditionnement de la première couche"""
        rows, cols = np.triu_indices(n_nodes, 1)
        return cls(n_nodes, zip(rows.tolist(), cols.tolist()))

    @classmethod
    def from_adjacency(cls, adjacency) -> "BinaryLayer":
        adj = np.asarray(adjacency).astype(bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise NetworkError(f"Matrice d'adjacence non carrée: {adj.shape}")
        if not np.array_equal(adj, adj.T):
            raise NetworkError("Matrice d'adjacence non symétrique")
        if np.any(np.diag(adj)):
            raise NetworkError("Boucles présentes dans la matrice d'adjacence")
        rows, cols = np.nonzero(np.triu(adj, 1))
        return cls(adj.shape[0], zip(rows.tolist(), cols.tolist()))

    @property
    def n_nodes(self) -> int:
        return self._n_nodes

    @property
    def edges(self) -> frozenset:
        return self._edges

    @property
    def n_edges(self) -> int:
        return len(self._edges)

    def adjacency(self) -> np.ndarray:
        """Matrice d'adjacence booléenne (lecture seule, mise en cache)"""
        if self._adjacency is None:
            adj = np.zeros((self._n_nodes, self._n_nodes), dtype=bool)
            if self._edges:
                idx = np.array(sorted(self._edges))
                adj[idx[:, 0], idx[:, 1]] = True
                adj[idx[:, 1], idx[:, 0]] = True
            adj.setflags(write=False)
            self._adjacency = adj
        return self._adjacency

    def sorted_edges(self) -> List[Dyad]:
        return sorted(self._edges)

    def issubset(self, other: "BinaryLayer") -> bool:
        return self._n_nodes == other._n_nodes and self._edges <= other._edges

    def with_edge(self, dyad: Dyad) -> "BinaryLayer":
        return BinaryLayer(self._n_nodes, self._edges | {_canonical(*dyad)})

    def without_edge(self, dyad: Dyad) -> "BinaryLayer":
        return BinaryLayer(self._n_nodes, self._edges - {_canonical(*dyad)})

    def relabeled(self, order: Sequence[int]) -> "BinaryLayer":
        """Nouvelle couche où le nœud i devient order[i]"""
        return BinaryLayer(self._n_nodes, ((order[i], order[j]) for i, j in self._edges))

    def __contains__(self, dyad) -> bool:
        i, j = dyad
        return _canonical(int(i), int(j)) in self._edges

    def __len__(self) -> int:
        return len(self._edges)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryLayer):
            return NotImplemented
        return self._n_nodes == other._n_nodes and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self._n_nodes, self._edges))

    def __repr__(self) -> str:
        return f"BinaryLayer(n_nodes={self._n_nodes}, n_edges={self.n_edges})"


class LayerStack:
    """
    Représentation multicouche y_{W}: W couches emboîtées sur les mêmes nœuds.
    Les couches sont indexées à partir de 1 comme les poids.
    """

    def __init__(self, layers: Sequence[BinaryLayer]):
        layers = tuple(layers)
        if not layers:
            raise NetworkError("Un empilement doit contenir au moins une couche")
        n_nodes = layers[0].n_nodes
        for w, layer in enumerate(layers, start=1):
            if layer.n_nodes != n_nodes:
                raise NetworkError(
                    f"La couche {w} a {layer.n_nodes} nœuds au lieu de {n_nodes}"
                )
        for w in range(1, len(layers)):
            extra = layers[w].edges - layers[w - 1].edges
            if extra:
                sample = sorted(extra)[:3]
                raise NetworkError(
                    f"Emboîtement violé: la couche {w + 1} contient {len(extra)} arête(s) "
                    f"absente(s) de la couche {w}, par exemple {sample}"
                )
        self._layers = layers
        self._complete = None

    @property
    def layers(self) -> Tuple[BinaryLayer, ...]:
        return self._layers

    @property
    def n_layers(self) -> int:
        return len(self._layers)

    @property
    def n_nodes(self) -> int:
        return self._layers[0].n_nodes

    def layer(self, w: int) -> BinaryLayer:
        if not 1 <= w <= self.n_layers:
            raise NetworkError(f"Couche {w} hors de [1, {self.n_layers}]")
        return self._layers[w - 1]

    def conditioning_layer(self, w: int) -> BinaryLayer:
        """Couche y_{w-1} sur laquelle y_w est conditionnée (y_0 = graphe complet)"""
        if w == 1:
            if self._complete is None:
                self._complete = BinaryLayer.complete(self.n_nodes)
            return self._complete
        return self.layer(w - 1)

    @property
    def edge_counts(self) -> List[int]:
        return [layer.n_edges for layer in self._layers]

    @property
    def dyad_counts(self) -> List[int]:
        """D_1 = N(N-1)/2 puis D_{w+1} = E_w"""
        n = self.n_nodes
        return [n * (n - 1) // 2] + self.edge_counts[:-1]

    def __iter__(self) -> Iterator[BinaryLayer]:
        return iter(self._layers)

    def __len__(self) -> int:
        return len(self._layers)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LayerStack):
            return NotImplemented
        return self._layers == other._layers

    def __hash__(self) -> int:
        return hash(self._layers)

    def __repr__(self) -> str:
        return f"LayerStack(n_nodes={self.n_nodes}, edge_counts={self.edge_counts})"


class NodeAttributes(Mapping):
    """
    Attributs nodaux catégoriels: nom -> une étiquette par nœud
    """

    def __init__(self, n_nodes: int, attributes: Mapping = None):
        self._n_nodes = n_nodes
        self._values: Dict[str, tuple] = {}
        self._codes: Dict[str, np.ndarray] = {}
        for name, labels in (attributes or {}).items():
            labels = tuple(labels)
            if len(labels) != n_nodes:
                raise NetworkError(
                    f"L'attribut '{name}' a {len(labels)} valeurs pour {n_nodes} nœuds"
                )
            self._values[str(name)] = labels

    @property
    def n_nodes(self) -> int:
        return self._n_nodes

    def codes(self, name: str) -> np.ndarray:
        """Codes entiers des étiquettes (égaux si et seulement si les étiquettes le sont)"""
        if name not in self._codes:
            _, codes = np.unique(np.asarray(self[name], dtype=str), return_inverse=True)
            codes = codes.astype(np.int64)
            codes.setflags(write=False)
            self._codes[name] = codes
        return self._codes[name]

    def relabeled(self, order: Sequence[int]) -> "NodeAttributes":
        """Attributs cohérents avec BinaryLayer.relabeled(order)"""
        permuted = {}
        for name, labels in self._values.items():
            new = [None] * self._n_nodes
            for i, label in enumerate(labels):
                new[order[i]] = label
            permuted[name] = new
        return NodeAttributes(self._n_nodes, permuted)

    def __getitem__(self, name: str) -> tuple:
        return self._values[name]

    def __iter__(self):
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def __repr__(self) -> str:
        return f"NodeAttributes(n_nodes={self._n_nodes}, names={list(self._values)})"


def ordinalize(raw, thresholds: Sequence[float]) -> WeightedNetwork:
    """
    Transforme une matrice de poids réels en réseau ordinal: le poids de
    (i, j) est le nombre de seuils t_k tels que raw[i][j] >= t_k
    """
    arr = np.asarray(raw, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise NetworkError(f"La matrice brute doit être carrée, reçu {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NetworkError("La matrice brute contient des valeurs non finies")
    if not np.array_equal(arr, arr.T):
        raise NetworkError("La matrice brute doit être symétrique")
    if np.any(np.diag(arr) != 0):
        raise NetworkError("La diagonale de la matrice brute doit être nulle")

    cuts = np.asarray(list(thresholds), dtype=float)
    if cuts.size == 0:
        raise NetworkError("Au moins un seuil est requis")
    if not np.all(np.isfinite(cuts)):
        raise NetworkError("Les seuils doivent être finis")
    if np.any(np.diff(cuts) <= 0):
        raise NetworkError(f"Les seuils doivent être strictement croissants, reçu {cuts.tolist()}")
    if cuts.size > MAX_WEIGHT:
        raise NetworkError(f"Au plus {MAX_WEIGHT} seuils sont autorisés")

    weights = (arr[:, :, None] >= cuts[None, None, :]).sum(axis=2)
    np.fill_diagonal(weights, 0)
    return WeightedNetwork(weights)


def quantile_thresholds(raw, levels: Sequence[float]) -> List[float]:
    """
    Seuils tirés des quantiles empiriques des poids positifs hors diagonale;
    les seuils égaux sont fusionnés
    """
    levels = np.asarray(list(levels), dtype=float)
    if levels.size == 0 or np.any((levels < 0) | (levels > 1)):
        raise NetworkError("Les niveaux de quantiles doivent être dans [0, 1]")
    if np.any(np.diff(levels) <= 0):
        raise NetworkError("Les niveaux de quantiles doivent être strictement croissants")
    arr = np.asarray(raw, dtype=float)
    values = arr[np.triu_indices(arr.shape[0], 1)]
    values = values[values > 0]
    if values.size == 0:
        raise NetworkError("Aucun poids positif: impossible de calculer des quantiles")
    cuts = np.unique(np.quantile(values, levels))
    if cuts.size < levels.size:
        logger.warning("Quantiles confondus: %d seuils distincts sur %d niveaux", cuts.size, levels.size)
    return cuts.tolist()


def decompose(y: WeightedNetwork, n_layers: int) -> LayerStack:
    """
    Décompose y en W couches binaires emboîtées (y[i][j] >= w dans la couche w)
    """
    if not 1 <= n_layers <= MAX_WEIGHT:
        raise NetworkError(f"Le nombre de couches doit être dans [1, {MAX_WEIGHT}], reçu {n_layers}")
    if y.max_weight > n_layers:
        raise NetworkError(
            f"Poids maximal observé {y.max_weight} supérieur au nombre de couches {n_layers}"
        )
    return LayerStack([BinaryLayer.from_adjacency(y.weights >= w) for w in range(1, n_layers + 1)])


def recompose(stack) -> WeightedNetwork:
    """
    Recompose le réseau pondéré: poids = nombre de couches contenant la dyade
    """
    if not isinstance(stack, LayerStack):
        stack = LayerStack(stack)
    weights = np.zeros((stack.n_nodes, stack.n_nodes), dtype=np.int64)
    for layer in stack:
        weights += layer.adjacency()
    return WeightedNetwork(weights)
