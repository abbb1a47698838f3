"""
File prodotti dai comandi: report JSON, dump CSV, GeoJSON.
Tutti i numeri sono scritti con 12 cifre significative.
"""

import csv
import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence

from core.errors import CoordinateError
from core.logger import logger
from core.model import Commodity, Instance
from core.paths import CandidatePath, CommodityBound
from core.solver import Solution
from core.utils import format_float

CANDIDATE_COLUMNS = ['commodity_o', 'commodity_d', 'ptype', 'tau', 'profit', 'hubs']
SOLUTION_COLUMNS = ['o', 'd', 'served', 't_direct', 't_prime', 'demand', 'profit', 'hubs']


@dataclass
class RunReport:
    command: str
    parameters: Dict[str, Any]
    timings: Dict[str, float] = field(default_factory=dict)
    result: Dict[str, Any] = field(default_factory=dict)
    exit_status: int = 0
    outputs: Dict[str, str] = field(default_factory=dict)

    def add_timing(self, name: str, seconds: float):
        self.timings[name] = max(0.0, float(seconds))

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def save(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)
        logger.log_run_action("Report salvato", str(path))
        return path

    @classmethod
    def load(cls, path) -> 'RunReport':
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
        return cls(**data)


def file_checksum(path) -> str:
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _hubs_text(hubs: Sequence[int]) -> str:
    return ";".join(str(h) for h in hubs)


def write_candidates(instance: Instance, candidates: Mapping[Commodity, Sequence[CandidatePath]], path) -> Path:
    """Dump canonico: commodity in ordine d'istanza, cammini per (tau, hub)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(CANDIDATE_COLUMNS)
        for commodity in instance.commodities:
            for candidate in sorted(candidates.get(commodity, ()), key=lambda c: c.sort_key):
                writer.writerow([
                    commodity[0], commodity[1], candidate.ptype.value,
                    format_float(candidate.tau), format_float(candidate.profit), _hubs_text(candidate.hubs),
                ])
    return path


def write_bounds(instance: Instance, bounds: Mapping[Commodity, CommodityBound], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['o', 'd', 't_direct', 'ub', 'capped', 'witness'])
        for commodity in instance.commodities:
            bound = bounds[commodity]
            witness = _hubs_text(bound.witness.hubs) if bound.witness is not None else ""
            writer.writerow([
                commodity[0], commodity[1], format_float(instance.direct_time(commodity)),
                format_float(bound.ub), int(bound.capped), witness,
            ])
    return path


def write_solution_csv(instance: Instance, solution: Solution, path) -> Path:
    """Una riga per commodity, poi un blocco di riepilogo chiave,valore."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(SOLUTION_COLUMNS)
        for outcome in solution.outcomes:
            writer.writerow([
                outcome.commodity[0], outcome.commodity[1], int(outcome.served),
                format_float(outcome.t_direct), format_float(outcome.t_prime),
                format_float(outcome.demand), format_float(outcome.profit), _hubs_text(outcome.hubs),
            ])
        writer.writerow([])
        writer.writerow(['key', 'value'])
        writer.writerow(['line', str(solution.line) if solution.line is not None else ""])
        writer.writerow(['objective', format_float(solution.objective)])
        for key, value in solution.metrics.to_dict().items():
            writer.writerow([key, format_float(value)])
    return path


def solution_summary(solution: Solution) -> Dict[str, Any]:
    return {
        'line': list(solution.line.nodes) if solution.line is not None else None,
        'objective': solution.objective,
        'served': solution.served,
        'metrics': solution.metrics.to_dict(),
        'stats': dict(solution.stats),
    }


def build_geojson(instance: Instance, solution: Optional[Solution]) -> Dict[str, Any]:
    """
    FeatureCollection con la LineString della linea (role=hub_line) e un
    Point per ogni nodo, con domanda servita in uscita e in ingresso.
    """
    for node in instance.nodes:
        if not node.has_coordinates:
            raise CoordinateError(f"il nodo {node.id} ({node.label}) non ha coordinate lon/lat")

    served_out = [0.0] * instance.n
    served_in = [0.0] * instance.n
    hubs = set()
    features: List[Dict[str, Any]] = []
    if solution is not None:
        for outcome in solution.outcomes:
            if outcome.served:
                o, d = outcome.commodity
                served_out[o] += outcome.demand
                served_in[d] += outcome.demand
        if solution.line is not None:
            hubs = set(solution.line.nodes)
            features.append({
                'type': 'Feature',
                'geometry': {
                    'type': 'LineString',
                    'coordinates': [[instance.nodes[v].lon, instance.nodes[v].lat] for v in solution.line.nodes],
                },
                'properties': {'role': 'hub_line', 'nodes': list(solution.line.nodes)},
            })

    for node in instance.nodes:
        features.append({
            'type': 'Feature',
            'geometry': {'type': 'Point', 'coordinates': [node.lon, node.lat]},
            'properties': {
                'id': node.id,
                'label': node.label,
                'role': 'hub' if node.id in hubs else 'node',
                'population': node.population,
                'served_demand_out': served_out[node.id],
                'served_demand_in': served_in[node.id],
            },
        })
    return {'type': 'FeatureCollection', 'features': features}


def write_geojson(instance: Instance, solution: Optional[Solution], path) -> Path:
    collection = build_geojson(instance, solution)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(collection, f, indent=2)
    logger.log_run_action("✓ GeoJSON scritto", f"{path} ({len(collection['features'])} feature)")
    return path


def read_solution_line(path) -> Optional[List[int]]:
    """Legge la linea dal blocco di riepilogo di un solution.csv."""
    with open(path, 'r', encoding='utf-8', newline='') as f:
        for row in csv.reader(f):
            if len(row) == 2 and row[0] == 'line':
                return [int(v) for v in row[1].split("-")] if row[1] else None
    return None
