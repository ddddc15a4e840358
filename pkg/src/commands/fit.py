import logging
import sys
import time
from dataclasses import replace

from ..components.arguments import (add_common_arguments, add_model_arguments, add_network_arguments,
                                    load_network_input, resolve_config)
from ..config import RESOLVED_CONFIG_NAME
from ..data_loader import write_acceptance, write_posterior
from ..inference.exchange import run_inference
from ..inference.run_config import DataConfig
from ..utils.manifest import RunManifest, atomic_write_text, dump_json

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser('fit', help="échantillonne la loi a posteriori du modèle hiérarchique")
    add_common_arguments(parser)
    add_network_arguments(parser)
    add_model_arguments(parser)
    group = parser.add_argument_group("échantillonneur")
    group.add_argument('--chains', type=int, help="nombre de chaînes H")
    group.add_argument('--iterations', type=int, help="nombre d'itérations par chaîne")
    group.add_argument('--burn-in', type=float, help="fraction d'itérations écartées")
    group.add_argument('--thinning', type=int, help="intervalle d'éclaircissement")
    group.add_argument('--steps-per-edge', type=int, help="pas du réseau auxiliaire par arête de la couche inférieure")
    group.add_argument('--no-ads', action='store_true', help="marche aléatoire au lieu de la proposition ADS")
    parser.set_defaults(handler=run)


def run(args) -> int:
    overrides = {
        'chains': args.chains,
        'iterations': args.iterations,
        'burn_in': args.burn_in,
        'thinning': args.thinning,
        'steps_per_edge': args.steps_per_edge,
        'ads': False if args.no_ads else None,
    }
    cfg = resolve_config(args, overrides)
    manifest = RunManifest('fit', seed=cfg.run.seed, argv=getattr(args, 'argv', []))
    manifest.add_input(args.config)
    manifest.add_input(args.spec)

    start = time.perf_counter()
    net = load_network_input(args, cfg.data)
    for path in net.paths:
        manifest.add_input(path)
    cfg = replace(cfg, data=DataConfig(thresholds=net.thresholds, layers=net.stack.n_layers))
    manifest.record('load', time.perf_counter() - start)

    start = time.perf_counter()
    progress = sys.stderr.isatty() and not args.quiet
    sample = run_inference(net.stack, cfg.model, net.attrs, cfg.prior, cfg.run, progress=progress)
    manifest.record('sampling', time.perf_counter() - start)

    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    write_posterior(sample, out / "posterior.csv")
    write_acceptance(sample, out / "acceptance.csv")
    config = cfg.to_dict()
    atomic_write_text(out / RESOLVED_CONFIG_NAME, dump_json(config))
    manifest.config = config
    manifest.write(out)
    logger.info("%d tirages conservés par chaîne écrits dans %s", sample.n_kept, out)
    return 0
