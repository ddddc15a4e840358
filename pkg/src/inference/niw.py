"""
Couche hiérarchique Normale-Inverse-Wishart: mise à jour conjuguée de
(mu, Sigma) à partir des W vecteurs de paramètres de couche.
"""
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..config import PRIOR_KAPPA0, PRIOR_NU0_OFFSET
from ..errors import ConfigError, NumericalError, SpecError


def _check_spd(matrix: np.ndarray, name: str, error=ConfigError) -> None:
    if not np.allclose(matrix, matrix.T, rtol=1e-10, atol=1e-12):
        raise error(f"{name} doit être symétrique")
    try:
        np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError:
        raise error(f"{name} doit être définie positive") from None


@dataclass(frozen=True)
class NIWParams:
    """
    Paramètres (mu, kappa, Lambda, nu) d'une loi NIW, a priori ou a posteriori
    """
    mu: np.ndarray
    kappa: float
    scale: np.ndarray
    nu: float

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float).reshape(-1)
        scale = np.atleast_2d(np.asarray(self.scale, dtype=float))
        object.__setattr__(self, 'mu', mu)
        object.__setattr__(self, 'scale', scale)
        r = mu.size
        if scale.shape != (r, r):
            raise ConfigError(f"Lambda doit être {r}x{r}, reçu {scale.shape}")
        if not (self.kappa > 0):
            raise ConfigError(f"kappa doit être > 0, reçu {self.kappa}")
        if not (self.nu > r - 1):
            raise ConfigError(f"nu doit être > r - 1 = {r - 1}, reçu {self.nu}")
        _check_spd(scale, "Lambda")

    @property
    def dimension(self) -> int:
        return self.mu.size

    @classmethod
    def default(cls, dimension: int) -> "NIWParams":
        """mu0 = 0, kappa0 = 1, Lambda0 = I_r, nu0 = r + 2"""
        return cls(mu=np.zeros(dimension), kappa=PRIOR_KAPPA0,
                   scale=np.eye(dimension), nu=dimension + PRIOR_NU0_OFFSET)

    def to_dict(self) -> dict:
        return {'mu0': self.mu.tolist(), 'kappa0': float(self.kappa),
                'lambda0': self.scale.tolist(), 'nu0': float(self.nu)}


@dataclass(frozen=True)
class HyperState:
    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float).reshape(-1)
        sigma = np.atleast_2d(np.asarray(self.sigma, dtype=float))
        object.__setattr__(self, 'mu', mu)
        object.__setattr__(self, 'sigma', sigma)
        if sigma.shape != (mu.size, mu.size):
            raise SpecError(f"Sigma doit être {mu.size}x{mu.size}, reçu {sigma.shape}")
        _check_spd(sigma, "Sigma", NumericalError)

    def log_density(self, phi) -> float:
        """log N(phi; mu, Sigma)"""
        return float(stats.multivariate_normal.logpdf(phi, mean=self.mu, cov=self.sigma))

    def draw(self, rng: np.random.Generator) -> np.ndarray:
        return rng.multivariate_normal(self.mu, self.sigma)


def niw_full_conditional(prior: NIWParams, phis) -> NIWParams:
    """
    Loi conditionnelle complète de (mu, Sigma) sachant phi_1..phi_W:
    mu1 = (kappa0 mu0 + W phibar) / (kappa0 + W), kappa1 = kappa0 + W,
    Lambda1 = Lambda0 + S + kappa0 W / (kappa0 + W) (phibar - mu0)(phibar - mu0)',
    nu1 = nu0 + W
    """
    r = prior.dimension
    phis = np.asarray(phis, dtype=float)
    if phis.size == 0:
        return prior
    phis = phis.reshape(-1, phis.shape[-1]) if phis.ndim > 1 else phis.reshape(1, -1)
    if phis.shape[1] != r:
        raise SpecError(f"Vecteurs phi de dimension {phis.shape[1]}, attendu {r}")
    n = phis.shape[0]
    phibar = phis.mean(axis=0)
    centered = phis - phibar
    scatter = centered.T @ centered
    kappa1 = prior.kappa + n
    mu1 = (prior.kappa * prior.mu + n * phibar) / kappa1
    diff = (phibar - prior.mu)[:, None]
    scale1 = prior.scale + scatter + (prior.kappa * n / kappa1) * (diff @ diff.T)
    scale1 = 0.5 * (scale1 + scale1.T)
    return NIWParams(mu=mu1, kappa=kappa1, scale=scale1, nu=prior.nu + n)


def sample_hyper(params: NIWParams, rng: np.random.Generator) -> HyperState:
    """
    Sigma ~ IW(Lambda1, nu1) puis mu | Sigma ~ N(mu1, Sigma / kappa1)
    """
    r = params.dimension
    try:
        np.linalg.cholesky(params.scale)
    except np.linalg.LinAlgError:
        raise NumericalError("Échec de Cholesky sur Lambda1") from None
    sigma = stats.invwishart.rvs(df=params.nu, scale=params.scale, random_state=rng)
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float)).reshape(r, r)
    sigma = 0.5 * (sigma + sigma.T)
    if np.isinf(params.kappa):
        mu = params.mu.copy()
    else:
        try:
            mu = rng.multivariate_normal(params.mu, sigma / params.kappa, method='cholesky')
        except np.linalg.LinAlgError:
            raise NumericalError("Échec de Cholesky sur Sigma / kappa1") from None
    return HyperState(mu=mu, sigma=sigma)


def initial_hyper(prior: NIWParams) -> HyperState:
    """Point de départ: mu0 et la moyenne a priori de Sigma lorsqu'elle existe"""
    r = prior.dimension
    denom = prior.nu - r - 1
    sigma = prior.scale / denom if denom > 0 else prior.scale.copy()
    return HyperState(mu=prior.mu.copy(), sigma=sigma)
