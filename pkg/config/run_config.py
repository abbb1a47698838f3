"""
Configurazione effettiva di un'esecuzione.
Viene ripetuta nel run_report.json e riletta con --replay.
"""

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, Optional

from config.settings import DEFAULT_K_CAP, DEFAULT_LINE_CAP, DEFAULT_BNB_NODE_CAP


@dataclass
class RunConfig:
    command: str
    instance: str
    format: str = "csv-bundle"
    n: Optional[int] = None
    p: Optional[int] = None
    alpha: Optional[float] = None
    r: Optional[float] = None
    vartheta: Optional[float] = None
    seed: Optional[int] = None
    workers: Optional[int] = None
    strict_filter: Optional[bool] = None
    demand_model: Optional[str] = None
    ordered_pairs: Optional[bool] = None
    sparsify: Optional[float] = None
    method: str = "bnb"
    variant: str = "f1l_flow"
    cuts: str = ""
    milp_format: str = "mps"
    out: str = "out"
    solution: Optional[str] = None
    dump_aux: Optional[str] = None
    time_weighted: bool = True
    k_cap: int = DEFAULT_K_CAP
    line_cap: int = DEFAULT_LINE_CAP
    node_cap: int = DEFAULT_BNB_NODE_CAP

    def overrides(self) -> Dict[str, Any]:
        """Parametri dell'istanza impostati esplicitamente (prevalgono sul manifest)."""
        keys = ('p', 'alpha', 'r', 'vartheta', 'seed', 'strict_filter', 'demand_model')
        return {key: getattr(self, key) for key in keys if getattr(self, key) is not None}

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunConfig':
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})

    def save(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)
        return path

    @classmethod
    def load(cls, path) -> 'RunConfig':
        """Accetta sia un RunConfig salvato sia un run_report.json."""
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
        if 'parameters' in data and 'command' in data and 'instance' not in data:
            data = data['parameters']
        return cls.from_dict(data)
