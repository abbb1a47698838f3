"""
Export e import dei modelli MILP tramite pulp.

- export_model: LpProblem.writeMPS / writeLP su una copia del problema,
  preceduti da commenti con i metadati hubline (variante, tagli, n, p e
  registro SEC); limiti infiniti delle f scritti come 1e20.
- read_mps: metadati dai commenti, struttura da LpProblem.fromMPS.
- read_solution: righe "nome valore" o "nome=valore", commenti con '#'.

L'output è deterministico: lo stesso modello produce gli stessi byte.
"""

import math
import tempfile
from pathlib import Path
from typing import Dict, List, Optional

import pulp

from core.errors import HubLineError, ParseError, ValidationError
from core.logger import logger
from core.milp import Cut, MilpModel, SecCut, Variant
from core.utils import format_float

FORMATS = ("mps", "lp")

# prefisso dei commenti di metadati; "*SENSE:" di pulp non lo condivide
MPS_COMMENT = "* "


def _header_comments(model: MilpModel, opener: str, closer: str = "") -> List[str]:
    meta = model.metadata()
    lines = [f"{opener} hubline " + " ".join(f"{key}={meta[key]}" for key in sorted(meta)) + closer]
    for index, cut in enumerate(model.sec_cuts):
        nodes = ",".join(str(v) for v in cut.S)
        lines.append(f"{opener} sec {index} S={nodes} s={cut.s}{closer}")
    return lines


def export_model(model: MilpModel, fmt: str, path) -> Path:
    """Scrive il modello in formato mps o lp; errori di scrittura come OSError."""
    if fmt not in FORMATS:
        raise ValidationError(f"formato di export sconosciuto: {fmt}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # writeMPS/writeLP possono aggiungere variabili fittizie al problema
    problem = model.problem.deepcopy()
    if fmt == "mps":
        problem.writeMPS(str(path))
        header = _header_comments(model, "*")
    else:
        problem.writeLP(str(path))
        header = _header_comments(model, "\\*", " *\\")
    body = path.read_text(encoding='utf-8')
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write("\n".join(header) + "\n" + body)
    logger.log_milp_action(
        "✓ Modello esportato",
        f"{path} ({fmt}, {model.variable_count} variabili, {model.row_count} righe)"
    )
    return path


# --- lettura -----------------------------------------------------------------

def _parse_header(tokens: List[str], meta: Dict[str, str], cuts: List[SecCut], path, line_no: int):
    if len(tokens) >= 2 and tokens[1] == "hubline":
        for token in tokens[2:]:
            key, _, value = token.partition("=")
            meta[key] = value
    elif len(tokens) >= 5 and tokens[1] == "sec":
        fields = dict(token.partition("=")[::2] for token in tokens[3:])
        try:
            nodes = tuple(int(v) for v in fields['S'].split(","))
            cuts.append(SecCut(S=nodes, s=int(fields['s'])))
        except (KeyError, ValueError, HubLineError) as e:
            raise ParseError(f"taglio SEC non valido: {e}", path, line_no) from None


def read_mps(path) -> MilpModel:
    path = Path(path)
    meta: Dict[str, str] = {}
    cuts: List[SecCut] = []
    body: List[str] = []
    with open(path, 'r', encoding='utf-8') as f:
        for line_no, raw in enumerate(f, start=1):
            if raw.startswith(MPS_COMMENT):
                _parse_header(raw.split(), meta, cuts, path, line_no)
            elif raw.strip():
                body.append(raw.rstrip("\n"))
    if 'variant' not in meta:
        raise ParseError("intestazione hubline mancante", path)

    with tempfile.TemporaryDirectory() as tmp:
        plain = Path(tmp) / path.name
        plain.write_text("\n".join(body) + "\n", encoding='utf-8')
        try:
            _, problem = pulp.LpProblem.fromMPS(str(plain), sense=pulp.LpMaximize)
        except (ValueError, KeyError, IndexError) as e:
            raise ParseError(f"MPS non valido: {e}", path) from None

    try:
        variant = Variant(meta['variant'])
        cut_flags = frozenset(Cut(c) for c in meta.get('cuts', "").split(",") if c)
        n, p = int(meta.get('n', 0)), int(meta.get('p', 0))
    except ValueError as e:
        raise ParseError(f"metadati non validi: {e}", path) from None
    model = MilpModel(
        name=problem.name,
        variant=variant,
        cuts=cut_flags,
        n=n,
        p=p,
        problem=problem,
        sec_cuts=tuple(cuts),
    )
    logger.log_milp_action("Modello letto", f"{path}: {model.variable_count} variabili, {model.row_count} righe")
    return model


def same_structure(a: MilpModel, b: MilpModel, rel_tol: float = 1e-11) -> bool:
    """Confronto strutturale (nomi, tipi, limiti, coefficienti) tra due modelli."""
    def close(x: float, y: float) -> bool:
        if math.isinf(x) or math.isinf(y):
            return x == y
        return math.isclose(x, y, rel_tol=rel_tol, abs_tol=1e-15)

    if (a.variant, a.cuts, a.n, a.p, a.sec_cuts) != (b.variant, b.cuts, b.n, b.p, b.sec_cuts):
        return False
    if a.variables.keys() != b.variables.keys() or a.rows.keys() != b.rows.keys():
        return False
    for name, var in a.variables.items():
        other = b.variables[name]
        if var.kind is not other.kind or not close(var.lb, other.lb) or not close(var.ub, other.ub):
            return False
    objective_a = {k: v for k, v in a.objective.items() if v != 0.0}
    objective_b = {k: v for k, v in b.objective.items() if v != 0.0}
    if objective_a.keys() != objective_b.keys():
        return False
    if not all(close(v, objective_b[k]) for k, v in objective_a.items()):
        return False
    for row_name, row in a.rows.items():
        other = b.rows[row_name]
        if row.sense is not other.sense or not close(row.rhs, other.rhs):
            return False
        if [v for v, _ in row.coeffs] != [v for v, _ in other.coeffs]:
            return False
        if not all(close(x, y) for (_, x), (_, y) in zip(row.coeffs, other.coeffs)):
            return False
    return True


def read_solution(path, model: Optional[MilpModel] = None) -> Dict[str, float]:
    """
    Legge un file di soluzione di un solutore esterno.
    Con il modello, i nomi sconosciuti sono un errore.
    """
    path = Path(path)
    values: Dict[str, float] = {}
    with open(path, 'r', encoding='utf-8') as f:
        for line_no, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" in line:
                name, _, value = line.partition("=")
            else:
                parts = line.split()
                if len(parts) != 2:
                    raise ParseError(f"riga non valida: {raw.strip()!r}", path, line_no)
                name, value = parts
            name = name.strip()
            try:
                number = float(value.strip())
            except ValueError:
                raise ParseError(f"valore non numerico per {name}: {value.strip()!r}", path, line_no) from None
            if model is not None and name not in model.variables:
                raise ParseError(f"variabile sconosciuta: {name}", path, line_no)
            values[name] = number
    logger.log_milp_action("Soluzione importata", f"{path}: {len(values)} valori")
    return values


def import_solution(model: MilpModel, path) -> Dict[str, float]:
    return read_solution(path, model)


def write_solution(values: Dict[str, float], path) -> Path:
    """Scrive un assegnamento nel formato letto da read_solution."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        for name in sorted(values):
            f.write(f"{name} {format_float(values[name])}\n")
    return path
