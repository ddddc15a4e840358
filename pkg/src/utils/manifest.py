"""
Manifeste d'exécution: sous-commande, configuration résolue, empreintes
des entrées et des sorties, graine, version et durées. Écrit à côté de
chaque jeu de sorties.
"""
import hashlib
import json
import logging
import os
import tempfile
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional

from ..config import APP_NAME, VERSION

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def file_digest(path) -> str:
    sha = hashlib.sha256()
    with open(path, 'rb') as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b''):
            sha.update(chunk)
    return sha.hexdigest()


def dump_json(document) -> str:
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


def atomic_write_text(path, text: str) -> Path:
    """Écriture dans un fichier temporaire du même répertoire, puis os.replace"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='\n') as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


@dataclass
class RunManifest:
    subcommand: str
    config: dict = field(default_factory=dict)
    seed: Optional[int] = None
    argv: List[str] = field(default_factory=list)
    inputs: Dict[str, str] = field(default_factory=dict)
    outputs: Dict[str, str] = field(default_factory=dict)
    started_at: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec='seconds'))
    timings: Dict[str, float] = field(default_factory=dict)
    _clock: float = field(default_factory=time.perf_counter, repr=False)

    def add_input(self, path) -> None:
        # Les fichiers absents sont signalés par les lecteurs eux-mêmes
        if path is not None and Path(path).is_file():
            self.inputs[str(path)] = file_digest(path)

    def record(self, phase: str, seconds: float) -> None:
        self.timings[phase] = round(float(seconds), 3)

    def to_dict(self) -> dict:
        return {
            'tool': APP_NAME,
            'version': VERSION,
            'subcommand': self.subcommand,
            'argv': list(self.argv),
            'seed': self.seed,
            'config': self.config,
            'inputs': dict(sorted(self.inputs.items())),
            'outputs': dict(sorted(self.outputs.items())),
            'started_at': self.started_at,
            'timings': self.timings,
        }

    def write(self, out_dir) -> Path:
        """
        Empreintes de tous les fichiers du répertoire de sortie, puis écriture
        atomique du manifeste
        """
        out_dir = Path(out_dir)
        self.outputs = {
            p.relative_to(out_dir).as_posix(): file_digest(p)
            for p in sorted(out_dir.rglob('*'))
            if p.is_file() and p.name != MANIFEST_NAME and not p.name.startswith('.')
        }
        self.record('total', time.perf_counter() - self._clock)
        path = atomic_write_text(out_dir / MANIFEST_NAME, dump_json(self.to_dict()))
        logger.info("Manifeste écrit: %s (%d fichier(s) de sortie)", path, len(self.outputs))
        return path


def read_manifest(path) -> dict:
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    return json.loads(path.read_text(encoding='utf-8'))
