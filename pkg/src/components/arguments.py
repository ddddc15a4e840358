"""
Options de ligne de commande partagées par les sous-commandes et
préparation commune des entrées (réseau, attributs, configuration).
"""
import argparse
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Optional, Sequence

from ..config import DATASETS, DEFAULT_OUT_DIR, KARATE_THRESHOLDS, MAX_WEIGHT, RESOLVED_CONFIG_NAME
from ..core.network import LayerStack, NodeAttributes, WeightedNetwork, decompose, ordinalize, quantile_thresholds
from ..data_loader import load_karate, read_attributes, read_raw_edgelist, read_weighted_edgelist
from ..errors import ConfigError
from ..inference.niw import NIWParams
from ..inference.run_config import DataConfig, FitConfig, RunConfig, load_config, load_model

logger = logging.getLogger(__name__)


def float_list(text: str) -> List[float]:
    """'1,3,4' -> [1.0, 3.0, 4.0]"""
    try:
        return [float(token) for token in text.split(',') if token.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"liste de nombres séparés par des virgules attendue, reçu '{text}'") from None


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("options communes")
    group.add_argument('--config', type=Path, help="fichier de configuration JSON (ou manifeste d'une exécution)")
    group.add_argument('--seed', type=int, help="graine aléatoire (remplace run.seed)")
    group.add_argument('--out', type=Path, default=Path(DEFAULT_OUT_DIR), help="répertoire de sortie")
    verbosity = group.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true', help="journalisation détaillée")
    verbosity.add_argument('-q', '--quiet', action='store_true', help="avertissements et erreurs uniquement")


def add_network_arguments(parser: argparse.ArgumentParser, required: bool = True) -> None:
    group = parser.add_argument_group("réseau observé")
    source = group.add_mutually_exclusive_group(required=required)
    source.add_argument('--data', type=Path, help="liste d'arêtes pondérées (i,j,weight)")
    source.add_argument('--dataset', choices=DATASETS, help="jeu de données intégré")
    group.add_argument('--attributes', type=Path, help="attributs nodaux (node,attr1,...)")
    cuts = group.add_mutually_exclusive_group()
    cuts.add_argument('--thresholds', type=float_list, help="seuils d'ordinalisation strictement croissants, ex. 2,4,8")
    cuts.add_argument('--quantiles', type=float_list, help="niveaux de quantiles des poids positifs, ex. 0.5,0.8,0.95")
    group.add_argument('--layers', type=int, help=f"nombre de couches W (1..{MAX_WEIGHT})")


def add_model_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--spec', type=Path, help="spécification du modèle (liste JSON de statistiques)")


@dataclass
class NetworkInput:
    network: WeightedNetwork
    attrs: NodeAttributes
    stack: LayerStack
    thresholds: Optional[List[float]] = None
    paths: List[Path] = field(default_factory=list)


def resolve_config(args: argparse.Namespace, run_overrides: dict = None) -> FitConfig:
    """
    Configuration effective: fichier --config, sinon --spec avec les valeurs
    par défaut. --seed remplace run.seed.
    """
    overrides = dict(run_overrides or {})
    if getattr(args, 'seed', None) is not None:
        overrides['seed'] = args.seed
    config_path = getattr(args, 'config', None)
    spec_path = getattr(args, 'spec', None)
    if config_path is not None:
        cfg = load_config(config_path, overrides)
        if spec_path is not None:
            model = load_model(spec_path)
            prior = cfg.prior if cfg.prior.dimension == model.dimension else NIWParams.default(model.dimension)
            cfg = replace(cfg, model=model, prior=prior)
        return cfg
    if spec_path is None:
        fallback = _sibling_config(args)
        if fallback is not None:
            logger.info("Configuration lue dans %s", fallback)
            return load_config(fallback, overrides)
        raise ConfigError("Une spécification de modèle est requise (--spec ou --config)")
    model = load_model(spec_path)
    run = RunConfig(**{k: v for k, v in overrides.items() if v is not None})
    return FitConfig(model=model, prior=NIWParams.default(model.dimension), run=run)


def _sibling_config(args: argparse.Namespace) -> Optional[Path]:
    """config.json écrit par fit à côté de l'échantillon a posteriori"""
    posterior = getattr(args, 'posterior', None)
    if posterior is None:
        return None
    candidate = Path(posterior).parent / RESOLVED_CONFIG_NAME
    return candidate if candidate.exists() else None


def _data_settings(args: argparse.Namespace, data: DataConfig) -> DataConfig:
    thresholds = getattr(args, 'thresholds', None)
    quantiles = getattr(args, 'quantiles', None)
    layers = getattr(args, 'layers', None)
    # Des seuils donnés en ligne de commande remplacent toute la section data
    if thresholds is not None or quantiles is not None:
        return DataConfig(thresholds=thresholds, quantiles=quantiles, layers=layers)
    return DataConfig(thresholds=data.thresholds, quantiles=data.quantiles,
                      layers=layers if layers is not None else data.layers)


def load_network_input(args: argparse.Namespace, data: DataConfig = DataConfig()) -> NetworkInput:
    """
    Lit le réseau (--data ou --dataset), l'ordinalise selon les seuils ou
    quantiles demandés puis le décompose en couches. Avec des seuils, les
    poids du fichier sont lus bruts, sans la borne des poids ordinaux.
    """
    data = _data_settings(args, data)
    paths = []
    if getattr(args, 'dataset', None) == 'karate':
        network, attrs = load_karate()
        raw = network.weights
        if data.thresholds is None and data.quantiles is None:
            data = replace(data, thresholds=list(KARATE_THRESHOLDS))
    else:
        if data.thresholds is None and data.quantiles is None:
            network = read_weighted_edgelist(args.data)
            raw = network.weights
        else:
            network = None
            raw = read_raw_edgelist(args.data)
        attrs = NodeAttributes(raw.shape[0])
        paths.append(args.data)
    n_nodes = raw.shape[0]
    if getattr(args, 'attributes', None) is not None:
        attrs = read_attributes(args.attributes, n_nodes)
        paths.append(args.attributes)

    thresholds = data.thresholds
    if data.quantiles is not None:
        thresholds = quantile_thresholds(raw, data.quantiles)
        logger.info("Seuils déduits des quantiles %s: %s", data.quantiles, thresholds)
    if thresholds is not None:
        network = ordinalize(raw, thresholds)
    n_layers = data.layers
    if n_layers is None:
        n_layers = len(thresholds) if thresholds is not None else max(network.max_weight, 1)
    stack = decompose(network, n_layers)
    logger.info("Réseau: %d nœuds, %d couches, E = %s", network.n_nodes, stack.n_layers, stack.edge_counts)
    return NetworkInput(network=network, attrs=attrs, stack=stack,
                        thresholds=list(thresholds) if thresholds is not None else None, paths=paths)


def parse_layer_params(values: Sequence[Sequence[float]], dimension: int) -> List[List[float]]:
    """Un vecteur par couche, chacun de dimension r"""
    params = [list(v) for v in values]
    for w, vector in enumerate(params, start=1):
        if len(vector) != dimension:
            raise ConfigError(f"--phi couche {w}: {len(vector)} valeurs pour {dimension} statistiques")
    return params
