from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from ..config import ACCEPTANCE_COLUMNS, HYPER_COLUMNS, POSTERIOR_COLUMNS
from ..errors import DataError, SpecError


@dataclass
class PosteriorSample:
    """
    Tirages conservés (après burn-in et éclaircissement) de toutes les chaînes.

    phi: (H, K, W, r), mu: (H, K, r), sigma: (H, K, r, r), iterations: (K,)
    """
    phi: np.ndarray
    mu: np.ndarray
    sigma: np.ndarray
    iterations: np.ndarray
    labels: Tuple[str, ...] = ()
    proposed: Optional[np.ndarray] = None
    accepted: Optional[np.ndarray] = None
    rejected_nonfinite: int = 0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.phi = np.asarray(self.phi, dtype=float)
        self.mu = np.asarray(self.mu, dtype=float)
        self.sigma = np.asarray(self.sigma, dtype=float)
        self.iterations = np.asarray(self.iterations, dtype=np.int64)
        if self.phi.ndim != 4:
            raise DataError(f"phi doit être de forme (H, K, W, r), reçu {self.phi.shape}")
        h, k, _, r = self.phi.shape
        if self.mu.shape != (h, k, r) or self.sigma.shape != (h, k, r, r):
            raise DataError("Formes incohérentes entre phi, mu et sigma")
        if self.iterations.shape != (k,):
            raise DataError("Le nombre d'itérations ne correspond pas aux tirages")
        if not self.labels:
            self.labels = tuple(f"s{p + 1}" for p in range(r))
        if len(self.labels) != r:
            raise SpecError(f"{len(self.labels)} libellés pour {r} paramètres")

    @property
    def n_chains(self) -> int:
        return self.phi.shape[0]

    @property
    def n_kept(self) -> int:
        return self.phi.shape[1]

    @property
    def n_layers(self) -> int:
        return self.phi.shape[2]

    @property
    def dimension(self) -> int:
        return self.phi.shape[3]

    @property
    def n_draws(self) -> int:
        return self.n_chains * self.n_kept

    def is_empty(self) -> bool:
        return self.n_draws == 0

    def flat_phi(self) -> np.ndarray:
        """Tirages de toutes les chaînes empilés: (H*K, W, r)"""
        return self.phi.reshape(-1, self.n_layers, self.dimension)

    def flat_hyper(self) -> Tuple[np.ndarray, np.ndarray]:
        r = self.dimension
        return self.mu.reshape(-1, r), self.sigma.reshape(-1, r, r)

    def acceptance_rates(self) -> np.ndarray:
        """Taux d'acceptation par chaîne et par couche, (H, W)"""
        if self.proposed is None or self.accepted is None:
            return np.full((self.n_chains, self.n_layers), np.nan)
        with np.errstate(invalid='ignore', divide='ignore'):
            return np.where(self.proposed > 0, self.accepted / np.maximum(self.proposed, 1), np.nan)

    def predictive_phi(self, rng: np.random.Generator) -> np.ndarray:
        """Un phi* ~ N(mu, Sigma) par hyper-tirage: paramètres d'une nouvelle transition"""
        mus, sigmas = self.flat_hyper()
        return np.array([rng.multivariate_normal(m, s) for m, s in zip(mus, sigmas)]).reshape(-1, self.dimension)

    def to_frames(self) -> Tuple[pd.DataFrame, pd.DataFrame]:
        """Formats longs: (chain, iteration, layer, param_index, value) et hyper"""
        h, k, w, r = self.phi.shape
        chain, it, layer, param = np.meshgrid(np.arange(h), self.iterations, np.arange(1, w + 1),
                                              np.arange(r), indexing='ij')
        phi_df = pd.DataFrame({
            'chain': chain.ravel(),
            'iteration': it.ravel(),
            'layer': layer.ravel(),
            'param_index': param.ravel(),
            'value': self.phi.ravel(),
        }, columns=POSTERIOR_COLUMNS)

        chain, it, row = np.meshgrid(np.arange(h), self.iterations, np.arange(r), indexing='ij')
        mu_df = pd.DataFrame({
            'chain': chain.ravel(), 'iteration': it.ravel(), 'quantity': 'mu',
            'row': row.ravel(), 'col': -1, 'value': self.mu.ravel(),
        })
        chain, it, row, col = np.meshgrid(np.arange(h), self.iterations, np.arange(r), np.arange(r),
                                          indexing='ij')
        sigma_df = pd.DataFrame({
            'chain': chain.ravel(), 'iteration': it.ravel(), 'quantity': 'sigma',
            'row': row.ravel(), 'col': col.ravel(), 'value': self.sigma.ravel(),
        })
        hyper_df = pd.concat([mu_df, sigma_df], ignore_index=True)[HYPER_COLUMNS]
        hyper_df = hyper_df.sort_values(['chain', 'iteration', 'quantity', 'row', 'col'],
                                        kind='mergesort').reset_index(drop=True)
        return phi_df, hyper_df

    def acceptance_frame(self) -> pd.DataFrame:
        rates = self.acceptance_rates()
        rows = []
        for c in range(self.n_chains):
            for w in range(self.n_layers):
                proposed = 0 if self.proposed is None else int(self.proposed[c, w])
                accepted = 0 if self.accepted is None else int(self.accepted[c, w])
                rows.append([c, w + 1, proposed, accepted, rates[c, w]])
        return pd.DataFrame(rows, columns=ACCEPTANCE_COLUMNS)

    @classmethod
    def from_frames(cls, phi_df: pd.DataFrame, hyper_df: pd.DataFrame, labels=()) -> "PosteriorSample":
        """Inverse de to_frames"""
        if phi_df.empty:
            raise DataError("Échantillon a posteriori vide")
        chains = np.sort(phi_df['chain'].unique())
        iterations = np.sort(phi_df['iteration'].unique())
        layers = np.sort(phi_df['layer'].unique())
        params = np.sort(phi_df['param_index'].unique())
        h, k, w, r = len(chains), len(iterations), len(layers), len(params)
        if len(phi_df) != h * k * w * r:
            raise DataError("Échantillon a posteriori incomplet: grille (chaîne, itération, couche, paramètre) lacunaire")

        ordered = phi_df.sort_values(['chain', 'iteration', 'layer', 'param_index'], kind='mergesort')
        phi = ordered['value'].to_numpy(dtype=float).reshape(h, k, w, r)

        mu = np.full((h, k, r), np.nan)
        sigma = np.full((h, k, r, r), np.nan)
        if hyper_df is not None and not hyper_df.empty:
            chain_pos = {c: n for n, c in enumerate(chains)}
            it_pos = {t: n for n, t in enumerate(iterations)}
            for quantity, block in hyper_df.groupby('quantity'):
                ci = block['chain'].map(chain_pos).to_numpy()
                ti = block['iteration'].map(it_pos).to_numpy()
                if np.any(pd.isna(ci)) or np.any(pd.isna(ti)):
                    raise DataError("Hyper-tirages sans tirage phi correspondant")
                ri = block['row'].to_numpy(dtype=int)
                if quantity == 'mu':
                    mu[ci.astype(int), ti.astype(int), ri] = block['value'].to_numpy(dtype=float)
                elif quantity == 'sigma':
                    co = block['col'].to_numpy(dtype=int)
                    sigma[ci.astype(int), ti.astype(int), ri, co] = block['value'].to_numpy(dtype=float)
                else:
                    raise DataError(f"Quantité d'hyper-paramètre inconnue '{quantity}'")
        return cls(phi=phi, mu=mu, sigma=sigma, iterations=iterations, labels=tuple(labels))
