"""
Configuration d'une analyse: modèle, loi a priori, réglages de
l'échantillonneur et prétraitement des données.

Le fichier de configuration est un document JSON validé contre
CONFIG_SCHEMA (JSON Schema, brouillon 7); chaque violation est
rapportée avec le chemin du champ fautif.
"""
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, List, Optional

import numpy as np
from jsonschema import Draft7Validator
from jsonschema.exceptions import ValidationError

from ..config import (ADS_ENABLED, ADS_GAMMA, ADS_SIGMA, BURN_IN, DEFAULT_SEED, INIT_JITTER,
                      MAX_WEIGHT, N_CHAINS, N_ITERATIONS, PROPOSAL_SIGMA, STATISTIC_KINDS,
                      STEPS_PER_EDGE, THINNING)
from ..core.simulation import SimControl
from ..core.statistics import ModelSpec
from ..errors import ConfigError
from .niw import NIWParams

_NUMBER_LIST = {'type': 'array', 'items': {'type': 'number'}}

CONFIG_SCHEMA = {
    'type': 'object',
    'additionalProperties': False,
    'properties': {
        'model': {
            'type': 'array',
            'minItems': 1,
            'items': {
                'type': 'object',
                'additionalProperties': False,
                'required': ['kind'],
                'properties': {
                    'kind': {'type': 'string', 'enum': list(STATISTIC_KINDS)},
                    'decay': {'type': 'number', 'minimum': 0},
                    'attribute': {'type': 'string'},
                },
            },
        },
        'prior': {
            'type': 'object',
            'additionalProperties': False,
            'properties': {
                'mu0': _NUMBER_LIST,
                'kappa0': {'type': 'number', 'exclusiveMinimum': 0},
                'lambda0': {'type': 'array', 'items': _NUMBER_LIST},
                'nu0': {'type': 'number', 'exclusiveMinimum': 0},
            },
        },
        'run': {
            'type': 'object',
            'additionalProperties': False,
            'properties': {
                'chains': {'type': 'integer', 'minimum': 1},
                'iterations': {'type': 'integer', 'minimum': 1},
                'burn_in': {'type': 'number', 'minimum': 0, 'exclusiveMaximum': 1},
                'thinning': {'type': 'integer', 'minimum': 1},
                'steps_per_edge': {'type': 'integer', 'minimum': 1},
                'ads': {'type': 'boolean'},
                'ads_gamma': {'type': 'number', 'minimum': 0},
                'ads_sigma': {'type': 'number', 'minimum': 0},
                'proposal_sigma': {'type': 'number', 'exclusiveMinimum': 0},
                'init_jitter': {'type': 'number', 'minimum': 0},
                'seed': {'type': 'integer', 'minimum': 0},
            },
        },
        'data': {
            'type': 'object',
            'additionalProperties': False,
            'properties': {
                'thresholds': {'type': ['array', 'null'], 'items': {'type': 'number'}},
                'quantiles': {'type': ['array', 'null'], 'items': {'type': 'number', 'minimum': 0, 'maximum': 1}},
                'layers': {'type': ['integer', 'null'], 'minimum': 1, 'maximum': MAX_WEIGHT},
            },
        },
    },
}


_VALIDATOR = Draft7Validator(CONFIG_SCHEMA)

_BOUNDS = {
    'minimum': ">=",
    'maximum': "<=",
    'exclusiveMinimum': ">",
    'exclusiveMaximum': "<",
}


def _field_path(parts) -> str:
    """deque(['model', 1, 'kind']) -> 'model[1].kind'"""
    text = ""
    for part in parts:
        if isinstance(part, int):
            text += f"[{part}]"
        else:
            text += f".{part}" if text else str(part)
    return text


def _child(where: str, key: str) -> str:
    return f"{where}.{key}" if where else key


def _describe(error: ValidationError) -> List[str]:
    where = _field_path(error.absolute_path)
    shown = where or "<racine>"
    kind, expected, instance = error.validator, error.validator_value, error.instance
    if kind == 'type':
        types = expected if isinstance(expected, list) else [expected]
        return [f"{shown}: type {' ou '.join(types)} attendu, reçu {type(instance).__name__}"]
    if kind == 'enum':
        return [f"{shown}: valeur '{instance}' hors de {expected}"]
    if kind in _BOUNDS:
        return [f"{shown}: doit être {_BOUNDS[kind]} {expected}"]
    if kind == 'minItems':
        return [f"{shown}: au moins {expected} élément(s) requis"]
    if kind == 'required':
        return [f"{_child(where, key)}: champ requis" for key in expected if key not in instance]
    if kind == 'additionalProperties':
        known = error.schema.get('properties', {})
        return [f"{_child(where, key)}: clé inconnue" for key in instance if key not in known]
    return [f"{shown}: {error.message}"]


def validate(document: Any) -> List[str]:
    """
    Violations 'chemin: message' de document contre CONFIG_SCHEMA (liste
    vide si le document est valide). Une section isolée se valide en
    l'enveloppant, par exemple {'run': {...}}.
    """
    errors = sorted(_VALIDATOR.iter_errors(document), key=lambda e: [str(p) for p in e.absolute_path])
    problems = [message for error in errors for message in _describe(error)]
    return list(dict.fromkeys(problems))


@dataclass(frozen=True)
class RunConfig:
    chains: int = N_CHAINS
    iterations: int = N_ITERATIONS
    burn_in: float = BURN_IN
    thinning: int = THINNING
    steps_per_edge: int = STEPS_PER_EDGE
    ads: bool = ADS_ENABLED
    ads_gamma: float = ADS_GAMMA
    ads_sigma: float = ADS_SIGMA
    proposal_sigma: float = PROPOSAL_SIGMA
    init_jitter: float = INIT_JITTER
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        problems = validate({'run': asdict(self)})
        if self.ads and self.chains < 3:
            problems.append(f"run.chains: doit être >= 3 lorsque ads est activé, reçu {self.chains}")
        if problems:
            raise ConfigError("; ".join(problems))

    @property
    def burn_in_iterations(self) -> int:
        return int(math.floor(self.burn_in * self.iterations))

    def kept_iterations(self) -> np.ndarray:
        """Indices (base 0) des itérations conservées"""
        return np.arange(self.burn_in_iterations, self.iterations, self.thinning)

    def sim_control(self) -> SimControl:
        return SimControl(steps_per_edge=self.steps_per_edge)


@dataclass(frozen=True)
class DataConfig:
    thresholds: Optional[List[float]] = None
    quantiles: Optional[List[float]] = None
    layers: Optional[int] = None

    def __post_init__(self):
        if self.thresholds is not None and self.quantiles is not None:
            raise ConfigError("data: thresholds et quantiles sont mutuellement exclusifs")


@dataclass(frozen=True)
class FitConfig:
    model: ModelSpec
    prior: NIWParams
    run: RunConfig = field(default_factory=RunConfig)
    data: DataConfig = field(default_factory=DataConfig)

    def to_dict(self) -> dict:
        """Configuration résolue, elle-même valide comme fichier de configuration"""
        return {
            'model': self.model.to_list(),
            'prior': self.prior.to_dict(),
            'run': asdict(self.run),
            'data': asdict(self.data),
        }


def _build_prior(raw: dict, dimension: int) -> NIWParams:
    default = NIWParams.default(dimension)
    mu0 = raw.get('mu0', default.mu.tolist())
    scale = raw.get('lambda0', default.scale.tolist())
    nu0 = raw.get('nu0', default.nu)
    if len(mu0) != dimension:
        raise ConfigError(f"prior.mu0: {len(mu0)} valeurs pour {dimension} statistiques")
    if len(scale) != dimension or any(len(row) != dimension for row in scale):
        raise ConfigError(f"prior.lambda0: matrice {dimension}x{dimension} attendue")
    try:
        return NIWParams(mu=mu0, kappa=raw.get('kappa0', default.kappa), scale=scale, nu=nu0)
    except ConfigError as exc:
        raise ConfigError(f"prior: {exc}") from None


def config_from_dict(document: dict, overrides: dict = None) -> FitConfig:
    """
    Valide un document de configuration et matérialise toutes les valeurs
    par défaut; overrides remplace des champs de la section run
    """
    problems = validate(document)
    if problems:
        raise ConfigError("Configuration invalide: " + "; ".join(problems))
    if 'model' not in document:
        raise ConfigError("model: champ requis")
    model = ModelSpec.from_list(document['model'])
    prior = _build_prior(document.get('prior', {}), model.dimension)
    run_fields = dict(document.get('run', {}))
    run_fields.update({k: v for k, v in (overrides or {}).items() if v is not None})
    run = RunConfig(**run_fields)
    data = DataConfig(**document.get('data', {}))
    return FitConfig(model=model, prior=prior, run=run, data=data)


def _read_document(path: Path, what: str) -> Any:
    if not path.exists():
        raise ConfigError(f"Fichier {what} introuvable: {path}")
    try:
        document = json.loads(path.read_text(encoding='utf-8'))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: JSON invalide (ligne {exc.lineno}): {exc.msg}") from None
    # Un manifeste d'exécution porte sa configuration résolue
    if isinstance(document, dict) and 'tool' in document and 'config' in document:
        document = document['config']
    return document


def load_config(path, overrides: dict = None) -> FitConfig:
    return config_from_dict(_read_document(Path(path), "de configuration"), overrides)


def load_data_config(path) -> DataConfig:
    """
    Section data seule d'une configuration ou d'un manifeste; les autres
    sections (model, prior, run) sont ignorées
    """
    document = _read_document(Path(path), "de configuration")
    if not isinstance(document, dict):
        raise ConfigError(f"<racine>: type object attendu, reçu {type(document).__name__}")
    data = document.get('data', {})
    problems = validate({'data': data})
    if problems:
        raise ConfigError("Configuration invalide: " + "; ".join(problems))
    return DataConfig(**data)


def load_model(path) -> ModelSpec:
    """
    Lit une spécification de modèle: liste JSON de statistiques ou
    configuration complète contenant une section model
    """
    document = _read_document(Path(path), "de spécification")
    if isinstance(document, dict):
        return config_from_dict(document).model
    problems = validate({'model': document})
    if problems:
        raise ConfigError("Spécification invalide: " + "; ".join(problems))
    return ModelSpec.from_list(document)
