"""
Lecture et écriture des fichiers de l'application: listes d'arêtes
pondérées, couches binaires, attributs nodaux, tirages a posteriori.

Format des listes d'arêtes (UTF-8, séparateur virgule):

    # n_nodes=34
    i,j,weight
    0,1,4
    ...

Les identifiants de nœuds sont des entiers 0..N-1; les dyades absentes
valent 0. La ligne d'en-tête `# n_nodes=N` conserve les nœuds isolés.
"""
import logging
import re
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import networkx as nx
import numpy as np
import pandas as pd

from .config import (ACCEPTANCE_COLUMNS, ATTRIBUTE_NODE_COLUMN, EDGELIST_COLUMNS, HYPER_COLUMNS,
                     LAYER_COLUMNS, MAX_WEIGHT, POSTERIOR_COLUMNS)
from .core.network import BinaryLayer, NodeAttributes, WeightedNetwork
from .errors import DataError, ParseError
from .inference.posterior import PosteriorSample

logger = logging.getLogger(__name__)

_HEADER_PATTERN = re.compile(r"^#\s*(.*)$")


def _parse_header(line: str, path: Path) -> Dict[str, str]:
    match = _HEADER_PATTERN.match(line.strip())
    if not match:
        return {}
    fields = {}
    for token in re.split(r"[\s,;]+", match.group(1).strip()):
        if not token:
            continue
        if '=' not in token:
            raise ParseError(f"En-tête invalide '{token}' (attendu clé=valeur)", path, 1)
        key, value = token.split('=', 1)
        fields[key.strip().lower()] = value.strip()
    if fields.get('directed', 'false').lower() not in ('false', '0', 'no'):
        raise ParseError("Les réseaux orientés ne sont pas pris en charge", path, 1)
    return fields


def _declared_nodes(fields: Dict[str, str], path: Path) -> Optional[int]:
    if 'n_nodes' not in fields:
        return None
    try:
        n_nodes = int(fields['n_nodes'])
    except ValueError:
        raise ParseError(f"n_nodes invalide '{fields['n_nodes']}'", path, 1) from None
    if n_nodes < 1:
        raise ParseError(f"n_nodes doit être positif, reçu {n_nodes}", path, 1)
    return n_nodes


def _parse_int(value, name: str, path: Path, line: int) -> int:
    if value is None or (isinstance(value, float) and np.isnan(value)):
        raise ParseError(f"Champ '{name}' manquant", path, line)
    text = str(value).strip()
    if not re.fullmatch(r"[+-]?\d+", text):
        raise ParseError(f"Champ '{name}' non entier: '{text}'", path, line)
    return int(text)


def _ordinal_weight(value, path: Path, line: int) -> int:
    weight = _parse_int(value, 'weight', path, line)
    if not 1 <= weight <= MAX_WEIGHT:
        raise ParseError(f"Poids {weight} hors de [1, {MAX_WEIGHT}] "
                         f"(--thresholds ou --quantiles pour des poids bruts)", path, line)
    return weight


def _raw_weight(value, path: Path, line: int) -> float:
    if value is None or (isinstance(value, float) and np.isnan(value)):
        raise ParseError("Champ 'weight' manquant", path, line)
    text = str(value).strip()
    try:
        weight = float(text)
    except ValueError:
        raise ParseError(f"Champ 'weight' non numérique: '{text}'", path, line) from None
    if not np.isfinite(weight) or weight <= 0:
        raise ParseError(f"Poids brut {text} invalide (réel fini strictement positif attendu)", path, line)
    return weight


def _read_table(path: Path, columns: List[str]) -> Tuple[Dict[str, str], Optional[pd.DataFrame]]:
    """
    En-tête optionnel `# ...`, puis un tableau CSV dont les colonnes sont
    vérifiées. Retourne (champs d'en-tête, tableau ou None si aucune ligne)
    """
    if not path.exists():
        raise DataError(f"Fichier introuvable: {path}")
    with open(path, encoding='utf-8') as handle:
        first = handle.readline()
    fields = _parse_header(first, path) if first else {}
    skip = 1 if first.lstrip().startswith('#') else 0
    try:
        df = pd.read_csv(path, skiprows=skip, dtype=str, skip_blank_lines=False,
                         keep_default_na=False, na_values=[''])
    except pd.errors.EmptyDataError:
        return fields, None
    except pd.errors.ParserError as exc:
        raise ParseError(f"Ligne mal formée ({exc})", path) from None
    header = [str(c).strip() for c in df.columns]
    if header != columns:
        raise ParseError(f"Colonnes {header} inattendues, attendu {columns}", path, skip + 1)
    df.columns = columns
    # Numéro de ligne (base 1) de chaque enregistrement
    df['line_no'] = np.arange(len(df)) + skip + 2
    df = df[df[columns].notna().any(axis=1)]
    return fields, df


def _read_edge_rows(path: Path, n_nodes: Optional[int], parse_weight) -> Tuple[int, list]:
    """
    Nombre de nœuds et triplets (i, j, poids) canoniques d'une liste
    d'arêtes. Les lignes `i,j,w` et `j,i,w` désignent la même dyade; des
    poids contradictoires sont une erreur.
    """
    if path.exists() and path.stat().st_size == 0:
        if n_nodes is None:
            raise ParseError("Fichier vide sans nombre de nœuds déclaré", path)
        return n_nodes, []

    fields, df = _read_table(path, EDGELIST_COLUMNS)
    declared = _declared_nodes(fields, path)
    if declared is not None and n_nodes is not None and declared != n_nodes:
        raise ParseError(f"n_nodes={declared} déclaré, {n_nodes} attendu", path, 1)
    n_nodes = declared if declared is not None else n_nodes

    triplets = []
    seen = {}
    for row in ([] if df is None else df.itertuples(index=False)):
        line = int(row.line_no)
        i = _parse_int(row.i, 'i', path, line)
        j = _parse_int(row.j, 'j', path, line)
        weight = parse_weight(row.weight, path, line)
        if i < 0 or j < 0:
            raise ParseError(f"Identifiant de nœud négatif ({i}, {j})", path, line)
        if i == j:
            raise ParseError(f"Boucle sur le nœud {i} non autorisée", path, line)
        if n_nodes is not None and max(i, j) >= n_nodes:
            raise ParseError(f"Identifiant de nœud hors de [0, {n_nodes}): ({i}, {j})", path, line)
        dyad = (min(i, j), max(i, j))
        if dyad in seen:
            previous_weight, previous_line = seen[dyad]
            if previous_weight != weight:
                raise ParseError(
                    f"Dyade {dyad} en double avec poids contradictoires "
                    f"({previous_weight} à la ligne {previous_line}, {weight} ici)", path, line)
            continue
        seen[dyad] = (weight, line)
        triplets.append((dyad[0], dyad[1], weight))

    if n_nodes is None:
        if not triplets:
            raise ParseError("Aucune arête et aucun nombre de nœuds déclaré", path)
        n_nodes = max(max(i, j) for i, j, _ in triplets) + 1
        logger.warning("%s: en-tête n_nodes absent, N = %d déduit des identifiants", path, n_nodes)
    logger.debug("%s: %d nœuds, %d dyades non nulles", path, n_nodes, len(triplets))
    return n_nodes, triplets


def read_weighted_edgelist(path, n_nodes: int = None) -> WeightedNetwork:
    """Liste d'arêtes à poids ordinaux entiers dans [1, MAX_WEIGHT]"""
    n_nodes, triplets = _read_edge_rows(Path(path), n_nodes, _ordinal_weight)
    return WeightedNetwork.from_edges(n_nodes, triplets)


def read_raw_edgelist(path, n_nodes: int = None) -> np.ndarray:
    """
    Liste d'arêtes à poids bruts (fréquences, durées...) sans borne
    supérieure, en matrice symétrique de réels à passer à ordinalize
    """
    n_nodes, triplets = _read_edge_rows(Path(path), n_nodes, _raw_weight)
    raw = np.zeros((n_nodes, n_nodes), dtype=float)
    for i, j, weight in triplets:
        raw[i, j] = raw[j, i] = weight
    return raw


def _write_table(df: pd.DataFrame, path: Path, n_nodes: int = None) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        if n_nodes is not None:
            handle.write(f"# n_nodes={n_nodes}\n")
        df.to_csv(handle, index=False, lineterminator='\n')


def write_weighted_edgelist(y: WeightedNetwork, path) -> None:
    """Écrit les dyades non nulles en ordre canonique (i < j, lexicographique)"""
    df = pd.DataFrame(y.edges(), columns=EDGELIST_COLUMNS)
    _write_table(df, Path(path), y.n_nodes)


def write_layer(layer: BinaryLayer, path) -> None:
    df = pd.DataFrame(layer.sorted_edges(), columns=LAYER_COLUMNS)
    _write_table(df, Path(path), layer.n_nodes)


def read_layer(path) -> BinaryLayer:
    path = Path(path)
    fields, df = _read_table(path, LAYER_COLUMNS)
    n_nodes = _declared_nodes(fields, path)
    if n_nodes is None:
        raise ParseError("En-tête `# n_nodes=N` requis pour une couche", path, 1)
    edges = []
    for row in ([] if df is None else df.itertuples(index=False)):
        line = int(row.line_no)
        i = _parse_int(row.i, 'i', path, line)
        j = _parse_int(row.j, 'j', path, line)
        if i == j or not (0 <= i < n_nodes and 0 <= j < n_nodes):
            raise ParseError(f"Dyade invalide ({i}, {j}) pour {n_nodes} nœuds", path, line)
        edges.append((i, j))
    return BinaryLayer(n_nodes, edges)


def read_attributes(path, n_nodes: int = None) -> NodeAttributes:
    """
    Lit un fichier `node,attr1,attr2,...`: une ligne par nœud, étiquettes
    catégorielles lues comme chaînes
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"Fichier d'attributs introuvable: {path}")
    try:
        df = pd.read_csv(path, dtype=str, keep_default_na=False, na_values=[''])
    except pd.errors.EmptyDataError:
        raise ParseError("Fichier d'attributs vide", path) from None
    except pd.errors.ParserError as exc:
        raise ParseError(f"Ligne mal formée ({exc})", path) from None
    df.columns = [str(c).strip() for c in df.columns]
    if df.columns[0] != ATTRIBUTE_NODE_COLUMN:
        raise ParseError(f"La première colonne doit être '{ATTRIBUTE_NODE_COLUMN}'", path, 1)
    if len(df.columns) < 2:
        raise ParseError("Aucune colonne d'attribut", path, 1)

    nodes = [_parse_int(v, ATTRIBUTE_NODE_COLUMN, path, k + 2) for k, v in enumerate(df[ATTRIBUTE_NODE_COLUMN])]
    expected = n_nodes if n_nodes is not None else len(nodes)
    if sorted(nodes) != list(range(expected)):
        raise ParseError(f"Les nœuds doivent être exactement 0..{expected - 1}, chacun une fois", path)
    for name in df.columns[1:]:
        missing = df[name].isna().to_numpy()
        if missing.any():
            raise ParseError(f"Valeur manquante pour l'attribut '{name}'", path, int(np.argmax(missing)) + 2)

    order = np.argsort(nodes)
    attributes = {name: df[name].to_numpy()[order].tolist() for name in df.columns[1:]}
    return NodeAttributes(expected, attributes)


def write_attributes(attrs: NodeAttributes, path) -> None:
    df = pd.DataFrame({ATTRIBUTE_NODE_COLUMN: np.arange(attrs.n_nodes)})
    for name in attrs:
        df[name] = list(attrs[name])
    _write_table(df, Path(path))


def hyper_path(path) -> Path:
    """Fichier des hyper-tirages associé: posterior.csv -> posterior_hyper.csv"""
    path = Path(path)
    return path.with_name(f"{path.stem}_hyper{path.suffix or '.csv'}")


def write_posterior(sample: PosteriorSample, path) -> Tuple[Path, Path]:
    path = Path(path)
    phi_df, hyper_df = sample.to_frames()
    _write_table(phi_df, path)
    _write_table(hyper_df, hyper_path(path))
    return path, hyper_path(path)


def read_posterior(path, labels=()) -> PosteriorSample:
    path = Path(path)
    if not path.exists():
        raise DataError(f"Échantillon a posteriori introuvable: {path}")
    try:
        phi_df = pd.read_csv(path, float_precision='round_trip')
    except pd.errors.EmptyDataError:
        raise DataError(f"Échantillon a posteriori vide: {path}") from None
    if list(phi_df.columns) != POSTERIOR_COLUMNS:
        raise ParseError(f"Colonnes {list(phi_df.columns)} inattendues, attendu {POSTERIOR_COLUMNS}", path, 1)
    if phi_df.empty:
        raise DataError(f"Échantillon a posteriori vide: {path}")

    hyper_file = hyper_path(path)
    hyper_df = None
    if hyper_file.exists():
        hyper_df = pd.read_csv(hyper_file, float_precision='round_trip')
        if list(hyper_df.columns) != HYPER_COLUMNS:
            raise ParseError(f"Colonnes {list(hyper_df.columns)} inattendues, attendu {HYPER_COLUMNS}",
                             hyper_file, 1)
    else:
        logger.warning("Hyper-tirages absents (%s): mu et Sigma non disponibles", hyper_file)
    return PosteriorSample.from_frames(phi_df, hyper_df, labels)


def write_acceptance(sample: PosteriorSample, path) -> None:
    df = sample.acceptance_frame()[ACCEPTANCE_COLUMNS]
    _write_table(df, Path(path))


def load_karate() -> Tuple[WeightedNetwork, NodeAttributes]:
    """
    Club de karaté de Zachary (34 nœuds): nombre d'interactions comme poids,
    appartenance au club après la scission comme attribut 'club'
    """
    graph = nx.karate_club_graph()
    n_nodes = graph.number_of_nodes()
    triplets = []
    for i, j, data in graph.edges(data=True):
        if 'weight' not in data:
            raise DataError("La version installée de networkx ne fournit pas les poids du club de karaté")
        triplets.append((int(i), int(j), int(data['weight'])))
    clubs = [graph.nodes[k]['club'] for k in range(n_nodes)]
    return WeightedNetwork.from_edges(n_nodes, triplets), NodeAttributes(n_nodes, {'club': clubs})
