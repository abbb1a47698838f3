"""
Lettura e scrittura delle istanze.

Formati supportati:
- cab: matrice dei flussi 25x25 seguita dalla matrice dei costi 25x25
  (un eventuale primo token con la dimensione viene ignorato);
- csv-bundle: directory con manifest.txt, nodes.csv, edges.csv e
  commodities.csv opzionale.
"""

import csv
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from config.settings import (
    CAB_SIZE, DEFAULT_ALPHA, DEFAULT_P, DEFAULT_R, DEFAULT_SEED, DEFAULT_VARTHETA,
)
from core.errors import ParseError, ValidationError
from core.logger import logger
from core.model import (
    DemandModel, ExplicitRevenue, GammaRule, Instance, Node, Params,
    all_pairs, default_commodities,
)

FORMATS = ("cab", "csv-bundle")

MANIFEST_FILE = "manifest.txt"
NODES_FILE = "nodes.csv"
EDGES_FILE = "edges.csv"
COMMODITIES_FILE = "commodities.csv"

# Chiavi del manifest e relativi convertitori
_MANIFEST_KEYS = {
    'n': int,
    'p': int,
    'alpha': float,
    'r': float,
    'vartheta': float,
    'seed': int,
    'revenue_mode': str,
    'commodities': str,
    'demand_model': str,
    'strict_filter': lambda v: parse_bool(v),
    'selfloop_dominance_exempt': lambda v: parse_bool(v),
}


def parse_bool(value: str) -> bool:
    lowered = str(value).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"valore booleano non valido: {value!r}")


def load_instance(path, fmt: str, subset: Optional[int] = None,
                  overrides: Optional[Dict[str, Any]] = None,
                  ordered_pairs: Optional[bool] = None) -> Instance:
    """
    Carica un'istanza NON ancora chiusa metricamente.

    Args:
        path: file CAB o directory csv-bundle
        fmt: 'cab' oppure 'csv-bundle'
        subset: per CAB, numero di nodi iniziali da usare
        overrides: valori dei parametri che prevalgono su manifest e default
        ordered_pairs: forza la modalità a coppie ordinate

    Returns:
        Instance con la matrice dei tempi così come letta
    """
    path = Path(path)
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    if fmt == "cab":
        instance = _load_cab(path, subset, overrides, bool(ordered_pairs))
    elif fmt == "csv-bundle":
        instance = _load_bundle(path, overrides, ordered_pairs)
    else:
        raise ValidationError(f"formato sconosciuto: {fmt} (attesi: {', '.join(FORMATS)})")
    logger.log_run_action(
        "Istanza caricata",
        f"{path} ({fmt}): {instance.n} nodi, {len(instance.edges)} archi, "
        f"{len(instance.commodities)} commodity"
    )
    return instance


def _build_params(values: Dict[str, Any], explicit_revenues: Optional[List[float]] = None) -> Params:
    revenue_mode = values.get('revenue_mode', 'gamma')
    if revenue_mode == 'explicit':
        if explicit_revenues is None:
            raise ValidationError("revenue_mode=explicit richiede la colonna R in commodities.csv")
        revenue = ExplicitRevenue(tuple(explicit_revenues))
    elif revenue_mode == 'gamma':
        revenue = GammaRule(int(values.get('seed', DEFAULT_SEED)))
    else:
        raise ValidationError(f"revenue_mode sconosciuto: {revenue_mode}")
    try:
        demand_model = DemandModel(values.get('demand_model', DemandModel.ELASTIC.value))
    except ValueError:
        raise ValidationError(f"demand_model sconosciuto: {values.get('demand_model')}") from None
    return Params(
        p=int(values.get('p', DEFAULT_P)),
        alpha=float(values.get('alpha', DEFAULT_ALPHA)),
        r=float(values.get('r', DEFAULT_R)),
        vartheta=float(values.get('vartheta', DEFAULT_VARTHETA)),
        revenue=revenue,
        strict_filter=bool(values.get('strict_filter', True)),
        selfloop_dominance_exempt=bool(values.get('selfloop_dominance_exempt', True)),
        demand_model=demand_model,
    )


# --- CAB -------------------------------------------------------------------

def _read_numeric_tokens(path: Path) -> List[Tuple[float, int]]:
    tokens = []
    try:
        with open(path, 'r', encoding='utf-8') as f:
            for line_no, line in enumerate(f, start=1):
                for token in line.split():
                    try:
                        tokens.append((float(token), line_no))
                    except ValueError:
                        raise ParseError(f"token non numerico {token!r}", path, line_no) from None
    except IsADirectoryError:
        raise ParseError("atteso un file CAB, trovata una directory", path) from None
    return tokens


def _load_cab(path: Path, subset: Optional[int], overrides: Dict[str, Any],
              ordered_pairs: bool) -> Instance:
    tokens = _read_numeric_tokens(path)
    size = CAB_SIZE
    if len(tokens) == 2 * size * size + 1 and int(tokens[0][0]) == size:
        tokens = tokens[1:]
    elif len(tokens) != 2 * size * size:
        # dimensione dichiarata in testa, se coerente
        declared = int(tokens[0][0]) if tokens else 0
        if declared > 1 and len(tokens) == 2 * declared * declared + 1:
            size = declared
            tokens = tokens[1:]
        else:
            last_line = tokens[-1][1] if tokens else 1
            raise ParseError(
                f"attesi {2 * size * size} valori (due matrici {size}x{size}), trovati {len(tokens)}",
                path, last_line,
            )

    values = np.array([v for v, _ in tokens], dtype=float)
    flows = values[:size * size].reshape(size, size)
    costs = values[size * size:].reshape(size, size)

    n = size if subset is None else int(subset)
    if not (2 <= n <= size):
        raise ValidationError(f"sottoinsieme n={n} fuori da [2, {size}]")
    flows = flows[:n, :n]
    costs = costs[:n, :n].copy()
    np.fill_diagonal(costs, 0.0)

    # P_i = sqrt(sum_j W_ij) sul blocco selezionato
    populations = np.sqrt(np.clip(flows.sum(axis=1), 0.0, None))
    nodes = tuple(
        Node(id=i, label=f"CAB-{i + 1}", population=float(populations[i])) for i in range(n)
    )
    params = _build_params(overrides)
    return Instance(
        nodes=nodes,
        edges=all_pairs(n),
        time=costs,
        commodities=default_commodities(n, ordered=ordered_pairs),
        params=params,
    )


# --- csv-bundle -------------------------------------------------------------

def _read_manifest(path: Path) -> Dict[str, Any]:
    manifest_path = path / MANIFEST_FILE
    values: Dict[str, Any] = {}
    if not manifest_path.exists():
        raise ParseError("manifest.txt mancante", manifest_path)
    with open(manifest_path, 'r', encoding='utf-8') as f:
        for line_no, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith('#'):
                continue
            if '=' not in line:
                raise ParseError(f"riga senza '=': {line!r}", manifest_path, line_no)
            key, value = (part.strip() for part in line.split('=', 1))
            if key not in _MANIFEST_KEYS:
                logger.warning(f"⚠ Chiave manifest ignorata: {key} ({manifest_path}:{line_no})")
                continue
            try:
                values[key] = _MANIFEST_KEYS[key](value)
            except ValueError as e:
                raise ParseError(f"valore non valido per {key}: {e}", manifest_path, line_no) from None
    return values


def _read_csv_rows(csv_path: Path, required: Tuple[str, ...]):
    """Restituisce (numero di riga, riga) per ogni record del CSV."""
    if not csv_path.exists():
        raise ParseError("file mancante", csv_path)
    with open(csv_path, 'r', encoding='utf-8', newline='') as f:
        reader = csv.DictReader(f)
        header = [h.strip() for h in (reader.fieldnames or [])]
        missing = [c for c in required if c not in header]
        if missing:
            raise ParseError(f"colonne mancanti: {', '.join(missing)}", csv_path, 1)
        reader.fieldnames = header
        for row in reader:
            yield reader.line_num, {k: (v.strip() if isinstance(v, str) else v) for k, v in row.items()}


def _number(value, csv_path: Path, line_no: int, column: str, kind=float):
    try:
        return kind(value)
    except (TypeError, ValueError):
        raise ParseError(f"valore non valido nella colonna {column}: {value!r}", csv_path, line_no) from None


def _load_bundle(path: Path, overrides: Dict[str, Any], ordered_pairs: Optional[bool]) -> Instance:
    if not path.is_dir():
        raise ParseError("attesa una directory csv-bundle", path)
    manifest = _read_manifest(path)

    nodes_path = path / NODES_FILE
    nodes: Dict[int, Node] = {}
    for line_no, row in _read_csv_rows(nodes_path, ('id', 'label', 'population')):
        node_id = _number(row['id'], nodes_path, line_no, 'id', int)
        population = _number(row['population'], nodes_path, line_no, 'population')
        if population <= 0:
            raise ValidationError(f"{nodes_path}:{line_no}: popolazione non positiva per il nodo {node_id}")
        lon = row.get('lon')
        lat = row.get('lat')
        if node_id in nodes:
            raise ParseError(f"id duplicato {node_id}", nodes_path, line_no)
        nodes[node_id] = Node(
            id=node_id,
            label=row['label'],
            population=population,
            lon=_number(lon, nodes_path, line_no, 'lon') if lon not in (None, '') else None,
            lat=_number(lat, nodes_path, line_no, 'lat') if lat not in (None, '') else None,
        )
    n = len(nodes)
    if sorted(nodes) != list(range(n)):
        raise ValidationError(f"{nodes_path}: gli id devono essere densi in [0,{n})")
    if 'n' in manifest and manifest['n'] != n:
        raise ValidationError(f"manifest dichiara n={manifest['n']} ma nodes.csv ha {n} nodi")

    edges_path = path / EDGES_FILE
    time = np.full((n, n), np.inf)
    np.fill_diagonal(time, 0.0)
    edges = set()
    for line_no, row in _read_csv_rows(edges_path, ('k', 'm', 'time')):
        k = _number(row['k'], edges_path, line_no, 'k', int)
        m = _number(row['m'], edges_path, line_no, 'm', int)
        t = _number(row['time'], edges_path, line_no, 'time')
        if not (0 <= k < n and 0 <= m < n) or k == m:
            raise ParseError(f"arco non valido ({k},{m})", edges_path, line_no)
        if not t > 0 or math.isinf(t):
            raise ValidationError(f"{edges_path}:{line_no}: tempo non positivo sull'arco ({k},{m})")
        key = (min(k, m), max(k, m))
        if key in edges:
            raise ParseError(f"arco duplicato {key}", edges_path, line_no)
        edges.add(key)
        time[k, m] = time[m, k] = t

    values = dict(manifest)
    values.update(overrides)
    if ordered_pairs is None:
        ordered_pairs = values.get('commodities', 'unordered') == 'ordered'

    commodities_path = path / COMMODITIES_FILE
    explicit: Optional[List[float]] = None
    if commodities_path.exists():
        commodities = []
        revenues: List[Optional[float]] = []
        for line_no, row in _read_csv_rows(commodities_path, ('o', 'd')):
            o = _number(row['o'], commodities_path, line_no, 'o', int)
            d = _number(row['d'], commodities_path, line_no, 'd', int)
            commodities.append((o, d))
            raw_r = row.get('R')
            if raw_r not in (None, ''):
                value = _number(raw_r, commodities_path, line_no, 'R')
                if value < 0:
                    raise ValidationError(f"{commodities_path}:{line_no}: ricavo negativo")
                revenues.append(value)
            else:
                revenues.append(None)
        if values.get('revenue_mode') == 'explicit':
            if any(r is None for r in revenues):
                raise ValidationError(f"{commodities_path}: revenue_mode=explicit ma colonna R incompleta")
            explicit = [float(r) for r in revenues]
        commodities = tuple(commodities)
    else:
        commodities = default_commodities(n, ordered=ordered_pairs)

    params = _build_params(values, explicit)
    return Instance(
        nodes=tuple(nodes[i] for i in range(n)),
        edges=frozenset(edges),
        time=time,
        commodities=commodities,
        params=params,
    )


def write_bundle(instance: Instance, path, seed: Optional[int] = None,
                 explicit_revenues: bool = False) -> Path:
    """Scrive l'istanza come csv-bundle (archi = archi hub candidati)."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    params = instance.params
    manifest = {
        'n': instance.n,
        'p': params.p,
        'alpha': repr(params.alpha),
        'r': repr(params.r),
        'vartheta': repr(params.vartheta),
        'revenue_mode': 'explicit' if explicit_revenues else 'gamma',
        'demand_model': params.demand_model.value,
    }
    if isinstance(params.revenue, GammaRule):
        manifest['seed'] = params.revenue.seed if seed is None else seed
    elif seed is not None:
        manifest['seed'] = seed
    with open(path / MANIFEST_FILE, 'w', encoding='utf-8') as f:
        for key, value in manifest.items():
            f.write(f"{key}={value}\n")

    with open(path / NODES_FILE, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f)
        with_coords = all(node.has_coordinates for node in instance.nodes)
        writer.writerow(['id', 'label', 'population'] + (['lon', 'lat'] if with_coords else []))
        for node in instance.nodes:
            row = [node.id, node.label, repr(node.population)]
            if with_coords:
                row += [repr(node.lon), repr(node.lat)]
            writer.writerow(row)

    with open(path / EDGES_FILE, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f)
        writer.writerow(['k', 'm', 'time'])
        for k, m in instance.sorted_edges():
            writer.writerow([k, m, repr(float(instance.time[k, m]))])

    with open(path / COMMODITIES_FILE, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f)
        if explicit_revenues:
            if instance.revenues is None:
                raise ValidationError("ricavi espliciti richiesti ma non risolti")
            writer.writerow(['o', 'd', 'R'])
            for (o, d), value in zip(instance.commodities, instance.revenues):
                writer.writerow([o, d, repr(value)])
        else:
            writer.writerow(['o', 'd'])
            for o, d in instance.commodities:
                writer.writerow([o, d])
    return path
