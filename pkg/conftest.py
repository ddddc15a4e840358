# Racine du dépôt sur sys.path: les tests importent le paquet src
import pytest


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="exécute aussi les tests statistiques longs")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: test statistique long (activé par --runslow)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="nécessite --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)
