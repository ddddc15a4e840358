import numpy as np
import pytest
from hypothesis import given, settings

from src.core.network import (BinaryLayer, LayerStack, NodeAttributes, WeightedNetwork, decompose,
                              ordinalize, quantile_thresholds, recompose)
from src.errors import NetworkError

from strategies import nested_stacks, weighted_networks


def test_weighted_network_rejects_invalid_matrices():
    with pytest.raises(NetworkError):
        WeightedNetwork(np.array([[0, 1], [2, 0]]))
    with pytest.raises(NetworkError):
        WeightedNetwork(np.array([[1, 0], [0, 0]]))
    with pytest.raises(NetworkError):
        WeightedNetwork(np.array([[0, -1], [-1, 0]]))
    with pytest.raises(NetworkError):
        WeightedNetwork(np.array([[0, 0.5], [0.5, 0]]))
    with pytest.raises(NetworkError):
        WeightedNetwork(np.zeros((2, 3)))


def test_weighted_network_is_read_only(small_network):
    with pytest.raises(ValueError):
        small_network.weights[0, 1] = 5
    assert small_network.weight(1, 0) == 3
    assert small_network.max_weight == 3


def test_ordinalize_all_zero():
    y = ordinalize(np.zeros((4, 4)), [1, 2])
    assert y.max_weight == 0


def test_ordinalize_counts_thresholds():
    raw = np.zeros((3, 3))
    raw[0, 1] = raw[1, 0] = 5
    raw[1, 2] = raw[2, 1] = 8
    y = ordinalize(raw, [2, 4, 8])
    assert y.weight(0, 1) == 2
    assert y.weight(1, 2) == 3
    assert y.weight(0, 2) == 0


def test_ordinalize_rejects_bad_input():
    raw = np.zeros((3, 3))
    raw[0, 1] = 1
    with pytest.raises(NetworkError, match="symétrique"):
        ordinalize(raw, [1])
    with pytest.raises(NetworkError, match="strictement croissants"):
        ordinalize(np.zeros((3, 3)), [2, 2])
    with pytest.raises(NetworkError):
        ordinalize(np.zeros((3, 3)), [])


def test_quantile_thresholds_collapse_ties():
    raw = np.zeros((4, 4))
    for (i, j), v in {(0, 1): 1, (0, 2): 1, (1, 2): 1, (2, 3): 5}.items():
        raw[i, j] = raw[j, i] = v
    cuts = quantile_thresholds(raw, [0.25, 0.5])
    assert cuts == [1.0]
    assert quantile_thresholds(raw, [0.0, 1.0]) == [1.0, 5.0]


def test_decompose_empty_network():
    stack = decompose(WeightedNetwork.empty(5), 3)
    assert stack.n_layers == 3
    assert stack.edge_counts == [0, 0, 0]


def test_decompose_single_dyad():
    y = WeightedNetwork.from_edges(4, [(1, 3, 2)])
    stack = decompose(y, 3)
    assert (1, 3) in stack.layer(1)
    assert (3, 1) in stack.layer(2)
    assert (1, 3) not in stack.layer(3)


def test_decompose_rejects_too_few_layers(small_network):
    with pytest.raises(NetworkError, match="supérieur au nombre de couches"):
        decompose(small_network, 2)


def test_recompose_empty_layers():
    y = recompose([BinaryLayer.empty(4)] * 3)
    assert y == WeightedNetwork.empty(4)


def test_recompose_counts_layers():
    layers = [BinaryLayer(3, [(0, 1), (1, 2)]), BinaryLayer(3, [(0, 1)]), BinaryLayer.empty(3)]
    y = recompose(layers)
    assert y.weight(0, 1) == 2
    assert y.weight(1, 2) == 1


def test_layer_stack_rejects_nesting_violation():
    with pytest.raises(NetworkError, match="Emboîtement violé"):
        LayerStack([BinaryLayer(3, [(0, 1)]), BinaryLayer(3, [(1, 2)])])
    with pytest.raises(NetworkError):
        recompose([BinaryLayer(3, [(0, 1)]), BinaryLayer(3, [(0, 1), (1, 2)])])


def test_conditioning_layer_of_first_layer_is_complete(small_stack):
    y0 = small_stack.conditioning_layer(1)
    assert y0.n_edges == 15
    assert small_stack.conditioning_layer(3) == small_stack.layer(2)


def test_dyad_counts(small_stack):
    assert small_stack.dyad_counts == [15] + small_stack.edge_counts[:-1]


def test_binary_layer_canonical_pairs():
    layer = BinaryLayer(4, [(2, 1), (1, 2), (3, 0)])
    assert layer.sorted_edges() == [(0, 3), (1, 2)]
    with pytest.raises(NetworkError):
        BinaryLayer(3, [(1, 1)])
    with pytest.raises(NetworkError):
        BinaryLayer(3, [(0, 3)])


def test_node_attributes_length_and_codes():
    attrs = NodeAttributes(3, {'club': ['x', 'y', 'x']})
    codes = attrs.codes('club')
    assert codes[0] == codes[2] != codes[1]
    with pytest.raises(NetworkError):
        NodeAttributes(3, {'club': ['x', 'y']})


@settings(max_examples=1000, deadline=None)
@given(weighted_networks())
def test_recompose_decompose_identity(y):
    n_layers = max(y.max_weight, 1)
    stack = decompose(y, n_layers)
    assert recompose(stack) == y


@settings(max_examples=1000, deadline=None)
@given(nested_stacks())
def test_nesting_and_monotone_edge_counts(stack):
    for w in range(1, stack.n_layers):
        assert stack.layer(w + 1).edges <= stack.layer(w).edges
    counts = stack.edge_counts
    assert all(a >= b for a, b in zip(counts, counts[1:]))
    assert stack.dyad_counts[1:] == counts[:-1]
