import numpy as np
from hypothesis import strategies as st

from src.core.network import BinaryLayer, LayerStack, NodeAttributes, WeightedNetwork


@st.composite
def weighted_networks(draw, min_nodes=2, max_nodes=10, max_weight=4):
    n = draw(st.integers(min_nodes, max_nodes))
    n_dyads = n * (n - 1) // 2
    values = draw(st.lists(st.integers(0, max_weight), min_size=n_dyads, max_size=n_dyads))
    weights = np.zeros((n, n), dtype=np.int64)
    weights[np.triu_indices(n, 1)] = values
    return WeightedNetwork(weights + weights.T)


@st.composite
def layers(draw, min_nodes=2, max_nodes=10):
    n = draw(st.integers(min_nodes, max_nodes))
    n_dyads = n * (n - 1) // 2
    present = draw(st.lists(st.booleans(), min_size=n_dyads, max_size=n_dyads))
    rows, cols = np.triu_indices(n, 1)
    return BinaryLayer(n, [(int(i), int(j)) for i, j, keep in zip(rows, cols, present) if keep])


@st.composite
def nested_stacks(draw, min_nodes=2, max_nodes=8, max_layers=4):
    n_layers = draw(st.integers(1, max_layers))
    y = draw(weighted_networks(min_nodes, max_nodes, max_weight=n_layers))
    return LayerStack([BinaryLayer.from_adjacency(y.weights >= w) for w in range(1, n_layers + 1)])


@st.composite
def attributes(draw, n_nodes, name='faction', n_levels=3):
    labels = draw(st.lists(st.sampled_from('abcdefgh'[:n_levels]), min_size=n_nodes, max_size=n_nodes))
    return NodeAttributes(n_nodes, {name: labels})
