"""
Formulazioni MILP path-based per solutori esterni, costruite con pulp.

Varianti:
- f1l_flow:  z, y, f, v con vincoli di flusso anti-subtour
- f1l_sec:   z, y, v; i subtour si eliminano con tagli SEC aggiunti a posteriori
- f2l:       z, y' (archi orientati), l (MTZ), v con grado in/out per nodo
- f2l_prime: come f2l con grado aggregato 2 z_k; ammette le disuguaglianze
             "almeno un arco uscente" (ineq_new)

Tagli opzionali: desthub_orhub (d_c / o_c devono essere hub per i cammini
che li usano come tali), ineq_new.

Nomi: z_k, y_k_m (k < m), yp_k_m (orientato), f_k_m, l_k, v_c_i dove c è
l'indice della commodity e i la posizione del candidato nell'elenco
canonico (tau, hub) della commodity.

Il modello vive in un pulp.LpProblem; variables/rows/objective sono viste
ordinate per nome ricavate da LpProblem.to_dict().
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import pulp

from config.settings import INTEGRALITY_TOL, MPS_INFINITY, SEC_SUPPORT_THRESHOLD
from core.errors import InfeasibleAssignmentError, InvalidCombinationError, ValidationError
from core.logger import logger
from core.model import Commodity, Edge, Instance
from core.paths import CandidatePath, PathType
from core.solver import CandidateIndex, HubLine, Solution, assemble_solution

# variabile fittizia che pulp aggiunge a obiettivi e vincoli vuoti
DUMMY_VARIABLE = "__dummy"


class Variant(Enum):
    F1L_FLOW = "f1l_flow"
    F1L_SEC = "f1l_sec"
    F2L = "f2l"
    F2L_PRIME = "f2l_prime"

    @property
    def uses_arcs(self) -> bool:
        return self in (Variant.F2L, Variant.F2L_PRIME)


class Cut(Enum):
    DESTHUB_ORHUB = "desthub_orhub"
    INEQ_NEW = "ineq_new"


class VarKind(Enum):
    BINARY = "binary"
    CONTINUOUS = "continuous"


class Sense(Enum):
    LE = "L"
    GE = "G"
    EQ = "E"


_PULP_SENSE = {
    Sense.LE: pulp.LpConstraintLE,
    Sense.GE: pulp.LpConstraintGE,
    Sense.EQ: pulp.LpConstraintEQ,
}
_SENSE_OF = {value: sense for sense, value in _PULP_SENSE.items()}


@dataclass(frozen=True)
class Variable:
    name: str
    kind: VarKind
    lb: float = 0.0
    ub: float = 1.0


@dataclass(frozen=True)
class Row:
    name: str
    coeffs: Tuple[Tuple[str, float], ...]
    sense: Sense
    rhs: float

    def activity(self, values: Mapping[str, float]) -> float:
        return sum(coef * values.get(name, 0.0) for name, coef in self.coeffs)

    def slack(self, values: Mapping[str, float]) -> float:
        """Slack con segno: negativo se il vincolo è violato."""
        lhs = self.activity(values)
        if self.sense is Sense.LE:
            return self.rhs - lhs
        if self.sense is Sense.GE:
            return lhs - self.rhs
        return -abs(lhs - self.rhs)


@dataclass(frozen=True)
class SecCut:
    S: Tuple[int, ...]
    s: int

    def __post_init__(self):
        nodes = tuple(sorted(set(self.S)))
        if len(nodes) < 2:
            raise ValidationError("un taglio SEC richiede |S| >= 2")
        if self.s not in nodes:
            raise ValidationError(f"il nodo distinto {self.s} non appartiene a S")
        object.__setattr__(self, 'S', nodes)

    def to_dict(self) -> Dict:
        return {'S': list(self.S), 's': self.s}

    @classmethod
    def from_dict(cls, data: Dict) -> 'SecCut':
        return cls(S=tuple(int(v) for v in data['S']), s=int(data['s']))


def structure_of(problem: pulp.LpProblem) -> Tuple[Dict[str, Variable], Dict[str, float], Dict[str, Row]]:
    """Variabili, obiettivo e righe del problema, ordinati per nome."""
    # to_dict aggiunge la variabile fittizia agli obiettivi vuoti: si lavora su una copia
    data = problem.deepcopy().to_dict()
    variables: Dict[str, Variable] = {}
    for var in data['variables']:
        name = var['name']
        if name == DUMMY_VARIABLE:
            continue
        lb = float('-inf') if var['lowBound'] is None else float(var['lowBound'])
        ub = float('inf') if var['upBound'] is None else float(var['upBound'])
        binary = var['cat'] == pulp.LpInteger and lb == 0.0 and ub == 1.0
        variables[name] = Variable(name, VarKind.BINARY if binary else VarKind.CONTINUOUS, lb, ub)

    objective = {
        term['name']: float(term['value'])
        for term in data['objective']['coefficients']
        if term['name'] in variables and term['value'] != 0
    }
    rows: Dict[str, Row] = {}
    for constraint in data['constraints']:
        coeffs = tuple(sorted(
            (term['name'], float(term['value']))
            for term in constraint['coefficients'] if term['name'] in variables
        ))
        # pulp memorizza il vincolo come expr + constant (sense) 0
        rhs = -float(constraint['constant']) + 0.0
        rows[constraint['name']] = Row(constraint['name'], coeffs, _SENSE_OF[constraint['sense']], rhs)
    return dict(sorted(variables.items())), dict(sorted(objective.items())), dict(sorted(rows.items()))


def assemble_problem(name: str, objective, constraints: Mapping[str, pulp.LpConstraint],
                     variables: Iterable[pulp.LpVariable]) -> pulp.LpProblem:
    """LpProblem di massimo con i vincoli in ordine canonico di nome."""
    problem = pulp.LpProblem(name, pulp.LpMaximize)
    problem.setObjective(objective)
    for row_name in sorted(constraints):
        problem.addConstraint(constraints[row_name], row_name)
    problem.addVariables(sorted(variables, key=lambda v: v.name))
    return problem


@dataclass
class MilpModel:
    name: str
    variant: Variant
    cuts: FrozenSet[Cut]
    n: int
    p: int
    problem: pulp.LpProblem = field(repr=False, compare=False)
    sec_cuts: Tuple[SecCut, ...] = ()
    # nome della variabile v -> candidato (non esportato)
    candidate_of: Dict[str, CandidatePath] = field(default_factory=dict, repr=False)

    @cached_property
    def _structure(self):
        return structure_of(self.problem)

    @property
    def variables(self) -> Dict[str, Variable]:
        return self._structure[0]

    @property
    def objective(self) -> Dict[str, float]:
        return self._structure[1]

    @property
    def rows(self) -> Dict[str, Row]:
        return self._structure[2]

    @property
    def row_count(self) -> int:
        return len(self.rows)

    @property
    def variable_count(self) -> int:
        return len(self.variables)

    def lp_variables(self) -> Dict[str, pulp.LpVariable]:
        return {v.name: v for v in self.problem.variables() if v.name != DUMMY_VARIABLE}

    def metadata(self) -> Dict[str, str]:
        return {
            'variant': self.variant.value,
            'cuts': ",".join(sorted(c.value for c in self.cuts)),
            'n': str(self.n),
            'p': str(self.p),
        }


def parse_cuts(text: Optional[str]) -> FrozenSet[Cut]:
    if not text:
        return frozenset()
    flags = set()
    for token in text.split(','):
        token = token.strip()
        if not token or token == 'none':
            continue
        try:
            flags.add(Cut(token))
        except ValueError:
            raise ValidationError(f"taglio sconosciuto: {token}") from None
    return frozenset(flags)


# --- nomi ------------------------------------------------------------------

def z_name(k: int) -> str:
    return f"z_{k}"


def y_name(k: int, m: int) -> str:
    return f"y_{min(k, m)}_{max(k, m)}"


def yp_name(k: int, m: int) -> str:
    return f"yp_{k}_{m}"


def f_name(k: int, m: int) -> str:
    return f"f_{k}_{m}"


def l_name(k: int) -> str:
    return f"l_{k}"


def v_name(c: int, i: int) -> str:
    return f"v_{c}_{i}"


def _constraint(variables: Mapping[str, pulp.LpVariable], name: str,
                coeffs: Iterable[Tuple[str, float]], sense: Sense, rhs: float) -> pulp.LpConstraint:
    expr = pulp.lpSum(coef * variables[var] for var, coef in coeffs)
    return pulp.LpConstraint(expr, sense=_PULP_SENSE[sense], name=name, rhs=float(rhs))


class _ModelBuilder:
    """Accumula variabili pulp e vincoli con nomi univoci."""

    def __init__(self):
        self.variables: Dict[str, pulp.LpVariable] = {}
        self.objective: Dict[str, float] = {}
        self.constraints: Dict[str, pulp.LpConstraint] = {}

    def var(self, name: str, kind: VarKind = VarKind.BINARY, lb: float = 0.0, ub: float = 1.0):
        if kind is VarKind.BINARY:
            self.variables[name] = pulp.LpVariable(name, cat=pulp.LpBinary)
        else:
            self.variables[name] = pulp.LpVariable(name, lowBound=lb, upBound=ub, cat=pulp.LpContinuous)

    def row(self, name: str, coeffs: Iterable[Tuple[str, float]], sense: Sense, rhs: float):
        self.constraints[name] = _constraint(self.variables, name, coeffs, sense, rhs)

    def problem(self, name: str) -> pulp.LpProblem:
        objective = pulp.lpSum(
            coef * self.variables[var] for var, coef in sorted(self.objective.items())
        )
        return assemble_problem(name, objective, self.constraints, self.variables.values())


def _ordered_candidates(instance: Instance, candidates: Mapping[Commodity, Sequence[CandidatePath]]):
    """(indice commodity, commodity, elenco canonico dei candidati)."""
    for c_index, commodity in enumerate(instance.commodities):
        paths = sorted(candidates.get(commodity, ()), key=lambda path: path.sort_key)
        yield c_index, commodity, paths


def build_milp(instance: Instance, candidates: Mapping[Commodity, Sequence[CandidatePath]],
               variant, cuts: Iterable = ()) -> MilpModel:
    variant = Variant(variant)
    cuts = frozenset(Cut(c) for c in cuts)
    if Cut.INEQ_NEW in cuts and variant is not Variant.F2L_PRIME:
        raise InvalidCombinationError(
            f"ineq_new richiede la variante f2l_prime (ricevuto {variant.value})"
        )

    n, p = instance.n, instance.params.p
    edges = instance.sorted_edges()
    arcs = [(k, m) for k, m in edges] + [(m, k) for k, m in edges]
    arcs.sort()
    b = _ModelBuilder()

    for k in range(n):
        b.var(z_name(k))
    b.row("hubs", ((z_name(k), 1.0) for k in range(n)), Sense.EQ, p)

    # variabili v e obiettivo
    usage: Dict[Tuple[int, Edge], List[str]] = {}
    candidate_of: Dict[str, CandidatePath] = {}
    for c_index, commodity, paths in _ordered_candidates(instance, candidates):
        names = []
        for i, path in enumerate(paths):
            name = v_name(c_index, i)
            b.var(name)
            b.objective[name] = path.profit
            candidate_of[name] = path
            names.append(name)
            for edge in sorted(path.hub_edges):
                usage.setdefault((c_index, edge), []).append(name)
        b.row(f"assign_{c_index}", ((name, 1.0) for name in names), Sense.LE, 1.0)

        if Cut.DESTHUB_ORHUB in cuts:
            o, d = commodity
            dest = [v_name(c_index, i) for i, path in enumerate(paths) if path.ptype in (PathType.ODH, PathType.DH)]
            orig = [v_name(c_index, i) for i, path in enumerate(paths) if path.ptype in (PathType.ODH, PathType.OH)]
            b.row(f"desthub_{c_index}", [(name, 1.0) for name in dest] + [(z_name(d), -1.0)], Sense.LE, 0.0)
            b.row(f"orhub_{c_index}", [(name, 1.0) for name in orig] + [(z_name(o), -1.0)], Sense.LE, 0.0)

    if variant.uses_arcs:
        _add_arc_rows(b, instance, edges, arcs, usage, variant, cuts)
    else:
        _add_edge_rows(b, instance, edges, arcs, usage, variant)

    model = MilpModel(
        name=f"hubline_{variant.value}",
        variant=variant,
        cuts=cuts,
        n=n,
        p=p,
        problem=b.problem(f"hubline_{variant.value}"),
        candidate_of=candidate_of,
    )
    logger.log_milp_action(
        "Modello costruito",
        f"{variant.value}, tagli={model.metadata()['cuts'] or 'nessuno'}: "
        f"{model.variable_count} variabili, {model.row_count} righe"
    )
    return model


def _add_edge_rows(b: _ModelBuilder, instance: Instance, edges, arcs, usage, variant: Variant):
    n, p = instance.n, instance.params.p
    for k, m in edges:
        b.var(y_name(k, m))
    b.row("edges", ((y_name(k, m), 1.0) for k, m in edges), Sense.EQ, p - 1)
    for k in range(n):
        incident = [(y_name(a, c), 1.0) for a, c in edges if k in (a, c)]
        b.row(f"deg_{k}", incident + [(z_name(k), -2.0)], Sense.LE, 0.0)
    for c_index in range(len(instance.commodities)):
        for k, m in edges:
            terms = [(name, 1.0) for name in usage.get((c_index, (k, m)), ())]
            b.row(f"link_{c_index}_{k}_{m}", terms + [(y_name(k, m), -1.0)], Sense.LE, 0.0)

    if variant is not Variant.F1L_FLOW:
        return
    for k, m in arcs:
        b.var(f_name(k, m), VarKind.CONTINUOUS, 0.0, MPS_INFINITY)
    for k in range(n):
        out = [(f_name(a, c), 1.0) for a, c in arcs if a == k]
        b.row(f"flowcap_{k}", out + [(z_name(k), -(p - 1.0))], Sense.LE, 0.0)
    for m in range(n):
        inflow = [(f_name(a, c), 1.0) for a, c in arcs if c == m]
        outflow = [(f_name(a, c), -1.0) for a, c in arcs if a == m]
        for k in range(m + 1, n):
            # sum_in - sum_out >= z_m + (z_k - 1) p
            b.row(f"flowbal_{m}_{k}", inflow + outflow + [(z_name(m), -1.0), (z_name(k), -float(p))],
                  Sense.GE, -float(p))
    for k, m in edges:
        b.row(f"flowlink_{k}_{m}", [(f_name(k, m), 1.0), (f_name(m, k), 1.0), (y_name(k, m), -(p - 1.0))],
              Sense.LE, 0.0)


def _add_arc_rows(b: _ModelBuilder, instance: Instance, edges, arcs, usage, variant: Variant, cuts):
    n, p = instance.n, instance.params.p
    for k, m in arcs:
        b.var(yp_name(k, m))
    for k in range(n):
        b.var(l_name(k), VarKind.CONTINUOUS, 0.0, float(n - 1))
    b.row("arcs", ((yp_name(k, m), 1.0) for k, m in arcs), Sense.EQ, p - 1)

    for k in range(n):
        out = [(yp_name(a, c), 1.0) for a, c in arcs if a == k]
        inc = [(yp_name(a, c), 1.0) for a, c in arcs if c == k]
        if variant is Variant.F2L:
            b.row(f"out_{k}", out + [(z_name(k), -1.0)], Sense.LE, 0.0)
            b.row(f"in_{k}", inc + [(z_name(k), -1.0)], Sense.LE, 0.0)
        else:
            b.row(f"degarc_{k}", out + inc + [(z_name(k), -2.0)], Sense.LE, 0.0)

    for k, m in arcs:
        b.row(f"mtz_{k}_{m}", [(l_name(k), 1.0), (l_name(m), -1.0), (yp_name(k, m), float(n))],
              Sense.LE, float(n - 1))

    for c_index in range(len(instance.commodities)):
        for k, m in edges:
            terms = [(name, 1.0) for name in usage.get((c_index, (k, m)), ())]
            b.row(f"link_{c_index}_{k}_{m}", terms + [(yp_name(k, m), -1.0), (yp_name(m, k), -1.0)],
                  Sense.LE, 0.0)

    if Cut.INEQ_NEW in cuts:
        for k in range(n - 1):
            out = [(yp_name(a, c), 1.0) for a, c in arcs if a == k]
            for m in range(k + 1, n):
                b.row(f"outhub_{k}_{m}", out + [(z_name(k), -1.0), (z_name(m), -1.0)], Sense.GE, -1.0)


# --- tagli SEC ---------------------------------------------------------------

def sec_row(cut: SecCut, edges: Iterable[Edge]) -> Tuple[Tuple[str, float], ...]:
    inside = set(cut.S)
    terms = [(y_name(k, m), 1.0) for k, m in sorted(edges) if k in inside and m in inside]
    terms += [(z_name(i), -1.0) for i in cut.S if i != cut.s]
    return tuple(terms)


def add_cuts(model: MilpModel, instance: Instance, cuts: Iterable[SecCut]) -> MilpModel:
    """Nuovo modello con i tagli SEC aggiunti (duplicati ignorati)."""
    if model.variant.uses_arcs:
        raise InvalidCombinationError("i tagli SEC si applicano alle varianti f1l")
    registry = list(model.sec_cuts)
    known = {cut.S for cut in registry}
    variables = model.lp_variables()
    constraints = dict(model.problem.constraints)
    added = 0
    for cut in cuts:
        if cut.S in known:
            continue
        known.add(cut.S)
        registry.append(cut)
        name = f"sec_{len(registry) - 1}"
        constraints[name] = _constraint(variables, name, sec_row(cut, instance.edges), Sense.LE, 0.0)
        added += 1
    logger.log_milp_action("Tagli SEC aggiunti", f"{added} nuovi, {len(registry)} totali")
    problem = assemble_problem(model.problem.name, model.problem.objective, constraints, variables.values())
    return replace(model, problem=problem, sec_cuts=tuple(registry))


def separate_sec(instance: Instance, z_values: Mapping[int, float],
                 y_values: Mapping[Edge, float],
                 threshold: float = SEC_SUPPORT_THRESHOLD) -> List[SecCut]:
    """
    Separazione per componenti connesse del supporto di y (soglia 0.5).
    Restituisce i tagli violati, con s = nodo di id minimo di S.
    """
    support = nx.Graph()
    for (k, m), value in y_values.items():
        if value >= threshold:
            support.add_edge(min(k, m), max(k, m))
    cuts = []
    for component in sorted((sorted(c) for c in nx.connected_components(support)), key=lambda c: c[0]):
        if len(component) < 2:
            continue
        inside = set(component)
        lhs = sum(value for (k, m), value in y_values.items() if k in inside and m in inside)
        s = component[0]
        rhs = sum(z_values.get(i, 0.0) for i in component if i != s)
        if lhs > rhs + INTEGRALITY_TOL:
            cuts.append(SecCut(S=tuple(component), s=s))
    return cuts


# --- assegnamenti ----------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    row: str
    slack: float
    detail: str = ""

    def __str__(self):
        extra = f" ({self.detail})" if self.detail else ""
        return f"{self.row}: slack {self.slack:.6g}{extra}"


def objective_value(model: MilpModel, values: Mapping[str, float]) -> float:
    return sum(coef * values.get(name, 0.0) for name, coef in model.objective.items())


def check_assignment(model: MilpModel, values: Mapping[str, float],
                     tol: float = INTEGRALITY_TOL) -> List[Violation]:
    """Vincoli, limiti e integralità violati dall'assegnamento."""
    violations = []
    for name in values:
        if name not in model.variables:
            violations.append(Violation(name, 0.0, "variabile sconosciuta"))
    for var in model.variables.values():
        value = values.get(var.name, 0.0)
        if value < var.lb - tol or value > var.ub + tol:
            violations.append(Violation(var.name, min(value - var.lb, var.ub - value), "fuori dai limiti"))
        if var.kind is VarKind.BINARY and min(abs(value), abs(value - 1.0)) > tol:
            violations.append(Violation(var.name, -min(abs(value), abs(value - 1.0)), "non intera"))
    for row in model.rows.values():
        slack = row.slack(values)
        if slack < -tol:
            violations.append(Violation(row.name, slack))
    return violations


def line_to_assignment(instance: Instance, candidates, model: MilpModel, line: HubLine) -> Dict[str, float]:
    """
    Sostituisce una linea nelle variabili del modello e sceglie v ottimo
    (miglior candidato compatibile per commodity).
    """
    values: Dict[str, float] = {name: 0.0 for name in model.variables}
    nodes = list(line.nodes)
    p = len(nodes)
    for k in nodes:
        values[z_name(k)] = 1.0

    if model.variant.uses_arcs:
        if model.variant is Variant.F2L:
            order = {node: position for position, node in enumerate(nodes)}
            for a, c in zip(nodes, nodes[1:]):
                values[yp_name(a, c)] = 1.0
        else:
            # archi orientati verso l'hub di id massimo
            root = nodes.index(max(nodes))
            order = {node: (p - 1) - abs(position - root) for position, node in enumerate(nodes)}
            for position in range(p - 1):
                a, c = nodes[position], nodes[position + 1]
                if position < root:
                    values[yp_name(a, c)] = 1.0
                else:
                    values[yp_name(c, a)] = 1.0
        for node, level in order.items():
            values[l_name(node)] = float(level)
    else:
        for a, c in zip(nodes, nodes[1:]):
            values[y_name(a, c)] = 1.0
        if model.variant is Variant.F1L_FLOW:
            # flusso uscente dall'hub di id massimo lungo la linea
            root = nodes.index(max(nodes))
            for i in range(root):
                values[f_name(nodes[i + 1], nodes[i])] = float(i + 1)
            for i in range(root + 1, p):
                values[f_name(nodes[i - 1], nodes[i])] = float(p - i)

    index = candidates if isinstance(candidates, CandidateIndex) else CandidateIndex(instance, candidates)
    chosen = {}
    for commodity in instance.commodities:
        best = index.best_compatible(commodity, line.edges)
        if best is not None:
            chosen[(commodity, best.hubs)] = True
    for name, path in model.candidate_of.items():
        if (path.commodity, path.hubs) in chosen:
            values[name] = 1.0
    return values


@dataclass
class Verification:
    solution: Optional[Solution]
    violations: List[Violation]
    cuts: List[SecCut]
    model_objective: float
    objective: float

    @property
    def has_subtour(self) -> bool:
        return bool(self.cuts)

    @property
    def feasible(self) -> bool:
        return not self.violations and not self.cuts and self.solution is not None

    def raise_for_violations(self):
        if self.violations:
            raise InfeasibleAssignmentError(self.violations)


def _line_from_edges(edges: Sequence[Edge], p: int) -> Optional[HubLine]:
    graph = nx.Graph()
    graph.add_edges_from(edges)
    if graph.number_of_nodes() != p or graph.number_of_edges() != p - 1:
        return None
    if not nx.is_connected(graph) or max(dict(graph.degree()).values()) > 2:
        return None
    ends = sorted(v for v, deg in graph.degree() if deg == 1)
    order = nx.shortest_path(graph, ends[0], ends[-1])
    return HubLine(tuple(order))


def verify_solution(instance: Instance, candidates, model: MilpModel,
                    values: Mapping[str, float], time_weighted: bool = True) -> Verification:
    """
    Ricostruisce la linea da z/y (o y'), controlla tutti i vincoli,
    riderive l'assegnamento dai v e ricalcola l'obiettivo.
    """
    violations = check_assignment(model, values)
    z_values = {k: values.get(z_name(k), 0.0) for k in range(instance.n)}
    y_values: Dict[Edge, float] = {}
    for k, m in instance.sorted_edges():
        if model.variant.uses_arcs:
            y_values[(k, m)] = values.get(yp_name(k, m), 0.0) + values.get(yp_name(m, k), 0.0)
        else:
            y_values[(k, m)] = values.get(y_name(k, m), 0.0)

    cuts = separate_sec(instance, z_values, y_values)
    open_edges = [edge for edge, value in y_values.items() if value > SEC_SUPPORT_THRESHOLD]
    line = _line_from_edges(open_edges, instance.params.p)

    assignment: Dict[Commodity, Optional[CandidatePath]] = {c: None for c in instance.commodities}
    for name, path in model.candidate_of.items():
        if values.get(name, 0.0) > SEC_SUPPORT_THRESHOLD:
            if assignment[path.commodity] is not None:
                violations.append(Violation(name, -1.0, "più cammini per la stessa commodity"))
                continue
            if line is not None and not path.hub_edges <= line.edges:
                violations.append(Violation(name, -1.0, "cammino non compatibile con la linea"))
                continue
            assignment[path.commodity] = path

    solution = assemble_solution(instance, line, assignment, time_weighted) if line is not None else None
    model_objective = objective_value(model, values)
    objective = solution.objective if solution is not None else sum(
        max(path.profit, 0.0) for path in assignment.values() if path is not None
    )
    if abs(model_objective - objective) > INTEGRALITY_TOL * max(1.0, abs(objective)):
        violations.append(Violation("objective", objective - model_objective, "obiettivo non coerente"))
    if line is None and not cuts:
        violations.append(Violation("line", -1.0, "archi aperti non formano una linea di p hub"))

    logger.log_milp_action(
        "Verifica soluzione",
        f"violazioni={len(violations)}, tagli SEC={len(cuts)}, linea={line}, obiettivo={objective:.6g}"
    )
    return Verification(solution, violations, cuts, model_objective, objective)


def expected_row_count(instance: Instance, variant, cuts: Iterable = ()) -> int:
    """Numero di righe in forma chiusa per variante e tagli."""
    variant = Variant(variant)
    cuts = frozenset(Cut(c) for c in cuts)
    n = instance.n
    e = len(instance.edges)
    c = len(instance.commodities)
    pairs = n * (n - 1) // 2
    count = 1 + c + e * c
    if variant is Variant.F1L_FLOW:
        count += 1 + n + n + pairs + e
    elif variant is Variant.F1L_SEC:
        count += 1 + n
    elif variant is Variant.F2L:
        count += 1 + 2 * n + 2 * e
    else:
        count += 1 + n + 2 * e
        if Cut.INEQ_NEW in cuts:
            count += pairs
    if Cut.DESTHUB_ORHUB in cuts:
        count += 2 * c
    return count
