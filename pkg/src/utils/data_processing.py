import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import pandas as pd
from statsmodels.tsa.stattools import acf

from ..config import NUMBER_FORMAT, SUMMARY_QUANTILES
from ..errors import DataError
from ..inference.posterior import PosteriorSample


def _quantile_column(level: float) -> str:
    return f"q{100 * level:g}"


def effective_sample_size(chains: np.ndarray) -> float:
    """
    Taille d'échantillon effective de tirages (H, K), autocorrélations par
    chaîne sommées par paires tant que la somme reste positive
    """
    chains = np.atleast_2d(np.asarray(chains, dtype=float))
    total = 0.0
    for x in chains:
        n = x.size
        if n < 3 or np.var(x) == 0:
            total += n
            continue
        rho = acf(x, nlags=n - 1, fft=True)
        tau = -1.0
        for k in range(0, n - 1, 2):
            pair = rho[k] + rho[k + 1]
            if pair <= 0:
                break
            tau += 2 * pair
        total += n / max(tau, 1e-12)
    return float(total)


def gelman_rubin(chains: np.ndarray) -> float:
    """
    Facteur de réduction d'échelle potentielle entre chaînes (H, K);
    NaN s'il y a moins de deux chaînes ou de deux tirages
    """
    chains = np.atleast_2d(np.asarray(chains, dtype=float))
    n_chains, n = chains.shape
    if n_chains < 2 or n < 2:
        return float('nan')
    within = np.mean(np.var(chains, axis=1, ddof=1))
    between = n * np.var(np.mean(chains, axis=1), ddof=1)
    if within == 0:
        return 1.0 if between == 0 else float('inf')
    var_hat = (n - 1) / n * within + between / n
    return float(math.sqrt(var_hat / within))


def _describe(chains: np.ndarray, quantiles: Sequence[float]) -> dict:
    flat = chains.ravel()
    row = {'mean': float(np.mean(flat)), 'sd': float(np.std(flat, ddof=1)) if flat.size > 1 else 0.0}
    for level, value in zip(quantiles, np.quantile(flat, quantiles)):
        row[_quantile_column(level)] = float(value)
    row['ess'] = effective_sample_size(chains)
    row['rhat'] = gelman_rubin(chains)
    return row


@dataclass
class PosteriorSummary:
    layers: pd.DataFrame
    hyper: pd.DataFrame
    predictive: pd.DataFrame = field(default_factory=pd.DataFrame)

    def to_text(self) -> str:
        """
        Tableaux lisibles: moyenne (écart-type) de chaque paramètre par
        couche, puis mu et la diagonale de Sigma
        """
        lines = []
        mean_fmt, sd_fmt = NUMBER_FORMAT['mean'], NUMBER_FORMAT['sd']
        rhat_fmt, ess_fmt = NUMBER_FORMAT['rhat'], NUMBER_FORMAT['ess']
        labels = list(dict.fromkeys(self.layers['label']))
        width = max(12, *(len(label) + 2 for label in labels))

        lines.append("Paramètres de couche phi_w: moyenne (écart-type)")
        lines.append("couche".ljust(8) + "".join(label.rjust(width + 8) for label in labels))
        for layer, block in self.layers.groupby('layer', sort=True):
            cells = [f"{mean_fmt.format(r.mean)} ({sd_fmt.format(r.sd)})" for r in block.itertuples()]
            lines.append(str(layer).ljust(8) + "".join(c.rjust(width + 8) for c in cells))

        worst = self.layers['rhat'].max()
        if np.isfinite(worst):
            lines.append(f"R-hat maximal: {rhat_fmt.format(worst)}, "
                         f"ESS minimale: {ess_fmt.format(self.layers['ess'].min())}")

        if not self.hyper.empty:
            lines.append("")
            lines.append("Hyper-paramètres: moyenne (écart-type)")
            for r in self.hyper.itertuples():
                name = f"mu[{r.label}]" if r.quantity == 'mu' else f"Sigma[{r.row_label},{r.label}]"
                lines.append(f"  {name.ljust(width + 14)}{mean_fmt.format(r.mean)} ({sd_fmt.format(r.sd)})")

        if not self.predictive.empty:
            lines.append("")
            lines.append("Loi prédictive de phi* ~ N(mu, Sigma): moyenne (écart-type)")
            for r in self.predictive.itertuples():
                lines.append(f"  {r.label.ljust(width + 14)}{mean_fmt.format(r.mean)} ({sd_fmt.format(r.sd)})")
        return "\n".join(lines) + "\n"


def summarize_posterior(
    sample: PosteriorSample,
    quantiles: Sequence[float] = SUMMARY_QUANTILES,
    rng: np.random.Generator = None
) -> PosteriorSummary:
    """
    Résumé a posteriori: une ligne par (couche, paramètre) et une ligne par
    composante de mu et par élément du triangle supérieur de Sigma. Avec
    rng, ajoute la loi prédictive d'un phi* tiré par hyper-tirage.
    """
    if sample is None or sample.is_empty():
        raise DataError("Impossible de résumer un échantillon a posteriori vide")
    quantiles = tuple(float(q) for q in quantiles)

    rows = []
    for w in range(sample.n_layers):
        for p, label in enumerate(sample.labels):
            row = {'layer': w + 1, 'param_index': p, 'label': label}
            row.update(_describe(sample.phi[:, :, w, p], quantiles))
            rows.append(row)
    layers = pd.DataFrame(rows)

    hyper_rows = []
    if np.all(np.isfinite(sample.mu)) and np.all(np.isfinite(sample.sigma)):
        for p, label in enumerate(sample.labels):
            row = {'quantity': 'mu', 'row': p, 'col': -1, 'row_label': label, 'label': label}
            row.update(_describe(sample.mu[:, :, p], quantiles))
            hyper_rows.append(row)
        for p in range(sample.dimension):
            for q in range(p, sample.dimension):
                row = {'quantity': 'sigma', 'row': p, 'col': q,
                       'row_label': sample.labels[p], 'label': sample.labels[q]}
                row.update(_describe(sample.sigma[:, :, p, q], quantiles))
                hyper_rows.append(row)
    hyper = pd.DataFrame(hyper_rows)

    predictive_rows = []
    if rng is not None and hyper_rows:
        draws = sample.predictive_phi(rng).reshape(sample.n_chains, sample.n_kept, sample.dimension)
        for p, label in enumerate(sample.labels):
            row = {'param_index': p, 'label': label}
            row.update(_describe(draws[:, :, p], quantiles))
            predictive_rows.append(row)
    predictive = pd.DataFrame(predictive_rows)
    return PosteriorSummary(layers=layers, hyper=hyper, predictive=predictive)
