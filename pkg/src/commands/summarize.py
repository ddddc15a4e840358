import logging
import time
from pathlib import Path

import numpy as np

from ..components.arguments import add_common_arguments, add_model_arguments, resolve_config
from ..config import DEFAULT_SEED, RESOLVED_CONFIG_NAME
from ..data_loader import read_posterior
from ..utils.data_processing import summarize_posterior
from ..utils.manifest import RunManifest
from ..utils.viz_helpers import create_posterior_histogram, create_trace_figure, write_figure

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser('summarize', help="résume un échantillon a posteriori")
    add_common_arguments(parser)
    add_model_arguments(parser)
    parser.add_argument('--posterior', type=Path, required=True, help="posterior.csv écrit par fit")
    parser.add_argument('--plots', action='store_true', help="exporte traces et histogrammes en HTML")
    parser.set_defaults(handler=run)


def _labels(args):
    """Libellés des paramètres si une configuration est disponible"""
    if args.config is None and args.spec is None and not (args.posterior.parent / RESOLVED_CONFIG_NAME).exists():
        return ()
    return resolve_config(args).model.labels


def run(args) -> int:
    seed = args.seed if args.seed is not None else DEFAULT_SEED
    manifest = RunManifest('summarize', seed=seed, argv=getattr(args, 'argv', []))
    for path in (args.config, args.spec, args.posterior):
        manifest.add_input(path)

    start = time.perf_counter()
    sample = read_posterior(args.posterior, _labels(args))
    summary = summarize_posterior(sample, rng=np.random.default_rng(seed))
    manifest.record('summarize', time.perf_counter() - start)

    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    summary.layers.to_csv(out / "summary_layers.csv", index=False, lineterminator='\n')
    summary.hyper.to_csv(out / "summary_hyper.csv", index=False, lineterminator='\n')
    if not summary.predictive.empty:
        summary.predictive.to_csv(out / "summary_predictive.csv", index=False, lineterminator='\n')
    text = summary.to_text()
    (out / "summary.txt").write_text(text, encoding='utf-8')
    if args.plots:
        for w in range(1, sample.n_layers + 1):
            for p in range(sample.dimension):
                write_figure(create_trace_figure(sample, w, p), out / "plots" / f"trace_layer{w}_p{p}.html")
                write_figure(create_posterior_histogram(sample, w, p), out / "plots" / f"hist_layer{w}_p{p}.html")

    manifest.write(out)
    print(text, end='')
    return 0
