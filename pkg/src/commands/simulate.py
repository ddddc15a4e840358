import logging
import sys
import time
from pathlib import Path

import numpy as np
import pandas as pd
from tqdm import tqdm

from ..components.arguments import (add_common_arguments, add_model_arguments, float_list,
                                    parse_layer_params, resolve_config)
from ..config import DATASETS, RESOLVED_CONFIG_NAME
from ..core.network import NodeAttributes, recompose
from ..core.simulation import SimControl, draw_layer_params, simulate_stack
from ..data_loader import load_karate, read_attributes, write_weighted_edgelist
from ..errors import ConfigError
from ..utils.manifest import RunManifest, atomic_write_text, dump_json

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser('simulate', help="simule des réseaux pondérés multicouches")
    add_common_arguments(parser)
    add_model_arguments(parser)
    parser.add_argument('--nodes', type=int, help="nombre de nœuds N")
    parser.add_argument('--layers', type=int, help="nombre de couches W")
    parser.add_argument('--phi', type=float_list, action='append',
                        help="paramètres d'une couche (répéter par couche), ex. --phi=-1.5,0.3")
    parser.add_argument('--mu', type=float_list, help="moyenne des phi_w tirés ~ N(mu, Sigma)")
    parser.add_argument('--sigma-diag', type=float_list, help="diagonale de Sigma")
    parser.add_argument('--replicates', type=int, default=1, help="nombre de réseaux simulés")
    parser.add_argument('--dataset', choices=DATASETS, help="attributs nodaux d'un jeu de données intégré")
    parser.add_argument("--attributes", type=Path, help="attributs nodaux (node,attr1,...)")
    parser.set_defaults(handler=run)


def _attributes(args):
    if args.attributes is not None:
        attrs = read_attributes(args.attributes, args.nodes)
    elif args.dataset == 'karate':
        _, attrs = load_karate()
    else:
        if args.nodes is None:
            raise ConfigError("--nodes est requis sans --attributes ni --dataset")
        return NodeAttributes(args.nodes)
    if args.nodes is not None and args.nodes != attrs.n_nodes:
        raise ConfigError(f"--nodes {args.nodes} incohérent avec les {attrs.n_nodes} nœuds des attributs")
    return attrs


def _parameter_source(args, dimension: int):
    """Retourne une fonction rng -> (W, r) tableau de paramètres"""
    if args.phi and args.mu is not None:
        raise ConfigError("--phi et --mu sont mutuellement exclusifs")
    if args.phi:
        phis = np.array(parse_layer_params(args.phi, dimension))
        if args.layers is not None and args.layers != len(phis):
            raise ConfigError(f"{len(phis)} vecteurs --phi pour --layers {args.layers}")
        return len(phis), lambda rng: phis
    if args.mu is not None:
        if args.layers is None:
            raise ConfigError("--layers est requis avec --mu")
        if len(args.mu) != dimension:
            raise ConfigError(f"--mu: {len(args.mu)} valeurs pour {dimension} statistiques")
        diag = args.sigma_diag if args.sigma_diag is not None else [1.0] * dimension
        if len(diag) != dimension or min(diag) <= 0:
            raise ConfigError("--sigma-diag: r valeurs strictement positives attendues")
        sigma = np.diag(diag)
        return args.layers, lambda rng: draw_layer_params(args.mu, sigma, args.layers, rng)
    raise ConfigError("Paramètres requis: --phi (par couche) ou --mu/--sigma-diag")


def run(args) -> int:
    cfg = resolve_config(args)
    manifest = RunManifest('simulate', seed=cfg.run.seed, argv=getattr(args, 'argv', []))
    for path in (args.config, args.spec, args.attributes):
        manifest.add_input(path)
    if args.replicates < 1:
        raise ConfigError(f"--replicates doit être >= 1, reçu {args.replicates}")

    spec = cfg.model
    attrs = _attributes(args)
    spec.check_attributes(attrs)
    n_layers, draw_params = _parameter_source(args, spec.dimension)
    ctrl = SimControl(steps_per_edge=cfg.run.steps_per_edge)
    rng = np.random.default_rng(cfg.run.seed)

    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    summary_rows, phi_rows = [], []
    progress = sys.stderr.isatty() and not args.quiet
    for rep in tqdm(range(1, args.replicates + 1), disable=not progress, desc="Simulation"):
        phis = draw_params(rng)
        stack = simulate_stack(list(phis), spec, attrs, attrs.n_nodes, n_layers, ctrl, rng)
        write_weighted_edgelist(recompose(stack), out / f"replicate_{rep:03d}.csv")
        for w, (edges, dyads) in enumerate(zip(stack.edge_counts, stack.dyad_counts), start=1):
            summary_rows.append((rep, w, edges, edges / dyads if dyads else 0.0))
            for p, value in enumerate(phis[w - 1]):
                phi_rows.append((rep, w, p, float(value)))

    summary = pd.DataFrame(summary_rows, columns=['replicate', 'layer', 'edges', 'density'])
    summary.to_csv(out / "simulation_summary.csv", index=False, lineterminator='\n')
    pd.DataFrame(phi_rows, columns=['replicate', 'layer', 'param_index', 'value']).to_csv(
        out / "simulation_phi.csv", index=False, lineterminator='\n')

    config = cfg.to_dict()
    atomic_write_text(out / RESOLVED_CONFIG_NAME, dump_json(config))
    manifest.config = config
    manifest.record('simulate', time.perf_counter() - start)
    manifest.write(out)

    for w, block in summary.groupby('layer'):
        logger.info("Couche %d: densité moyenne %.3f sur %d réplique(s)", w, block['density'].mean(), len(block))
    return 0
