import os
from pathlib import Path

import numpy as np
import pytest

from src.core.network import NodeAttributes, WeightedNetwork, decompose
from src.core.statistics import ModelSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def small_network():
    """6 nœuds, poids 0..3"""
    return WeightedNetwork.from_edges(6, [
        (0, 1, 3), (0, 2, 2), (1, 2, 1), (2, 3, 2),
        (3, 4, 1), (4, 5, 3), (1, 5, 1), (0, 4, 2),
    ])


@pytest.fixture
def small_stack(small_network):
    return decompose(small_network, 3)


@pytest.fixture
def faction_attrs():
    return NodeAttributes(6, {'faction': ['a', 'a', 'a', 'b', 'b', 'b']})


@pytest.fixture
def full_spec():
    return ModelSpec.from_list([
        {'kind': 'edges'},
        {'kind': 'gwesp'},
        {'kind': 'gwnsp'},
        {'kind': 'gwdegree'},
        {'kind': 'nodematch', 'attribute': 'faction'},
    ])


@pytest.fixture
def office_data():
    """
    Liste d'arêtes brute du réseau de bureau (40 nœuds), non distribuée:
    chemin fourni par HMERGM_OFFICE_DATA
    """
    path = os.environ.get('HMERGM_OFFICE_DATA')
    if not path or not Path(path).exists():
        pytest.skip("HMERGM_OFFICE_DATA non défini: données de bureau absentes")
    return Path(path)
