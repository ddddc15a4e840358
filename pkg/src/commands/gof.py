import logging
import sys
import time
from pathlib import Path

import numpy as np

from ..components.arguments import (add_common_arguments, add_model_arguments, add_network_arguments,
                                    float_list, load_network_input, resolve_config)
from ..config import GOF_QUANTILES, GOF_REPLICATES
from ..core.gof import posterior_predictive_gof
from ..core.simulation import SimControl
from ..data_loader import read_posterior
from ..errors import SpecError
from ..utils.manifest import RunManifest
from ..utils.viz_helpers import create_gof_figure, write_figure

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser('gof', help="adéquation a posteriori par les degrés pondérés")
    add_common_arguments(parser)
    add_network_arguments(parser)
    add_model_arguments(parser)
    parser.add_argument('--posterior', type=Path, required=True, help="posterior.csv écrit par fit")
    parser.add_argument('--replicates', type=int, default=GOF_REPLICATES, help="nombre de réseaux simulés R")
    parser.add_argument('--levels', type=float_list, default=list(GOF_QUANTILES),
                        help="niveaux de quantiles de l'enveloppe")
    parser.add_argument('--plots', action='store_true', help="exporte la figure des degrés en HTML")
    parser.set_defaults(handler=run)


def run(args) -> int:
    cfg = resolve_config(args)
    manifest = RunManifest('gof', seed=cfg.run.seed, argv=getattr(args, 'argv', []))
    for path in (args.config, args.spec, args.posterior):
        manifest.add_input(path)

    net = load_network_input(args, cfg.data)
    for path in net.paths:
        manifest.add_input(path)
    sample = read_posterior(args.posterior, cfg.model.labels)
    if sample.n_layers != net.stack.n_layers:
        raise SpecError(f"Échantillon à {sample.n_layers} couches pour un réseau décomposé en {net.stack.n_layers}")

    start = time.perf_counter()
    progress = sys.stderr.isatty() and not args.quiet
    report = posterior_predictive_gof(
        sample.flat_phi(), cfg.model, net.attrs, net.network, args.replicates,
        ctrl=SimControl(steps_per_edge=cfg.run.steps_per_edge),
        rng=np.random.default_rng(cfg.run.seed), quantile_levels=args.levels, progress=progress,
    )
    manifest.record('gof', time.perf_counter() - start)

    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    report.envelope_frame().to_csv(out / "gof_envelope.csv", index=False, lineterminator='\n')
    report.long_frame().to_csv(out / "gof_long.csv", index=False, lineterminator='\n')
    if args.plots:
        write_figure(create_gof_figure(report), out / "gof_degrees.html")

    manifest.config = {**cfg.to_dict(), 'gof': {'replicates': args.replicates, 'levels': list(report.quantile_levels)}}
    manifest.write(out)
    print(f"Couverture de l'enveloppe [{report.quantile_levels[0]:g}, {report.quantile_levels[-1]:g}]: "
          f"{100 * report.coverage:.1f} % des nœuds")
    return 0
