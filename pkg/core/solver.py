"""
Solutori esatti nativi.

- evaluate_line: valore di una linea fissata (miglior candidato compatibile
  per ogni commodity, altrimenti instradamento diretto).
- solve_enumerate: oracolo esaustivo su tutte le linee canoniche.
- solve_bnb: branch-and-bound best-first su linee parziali, con i bound
  per commodity come limite superiore.
- compute_metrics: % coppie servite, % domanda servita, % tempo risparmiato.

I pareggi si risolvono sempre in ordine lessicografico dei nodi.
"""

import heapq
import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from config.settings import DEFAULT_BNB_NODE_CAP, DEFAULT_LINE_CAP, EPS
from core.errors import ContractViolation, GuardRefusalError, NodeLimitError, ValidationError
from core.gravity import demand
from core.logger import logger
from core.model import Commodity, DemandModel, Edge, Instance
from core.paths import CandidatePath, CommodityBound, path_edges


@dataclass(frozen=True)
class HubLine:
    """Linea di p hub; orientata in modo canonico (primo id < ultimo id)."""
    nodes: Tuple[int, ...]

    def __post_init__(self):
        nodes = tuple(int(v) for v in self.nodes)
        if len(set(nodes)) != len(nodes):
            raise ContractViolation(f"linea non semplice: {list(nodes)}")
        if len(nodes) >= 2 and nodes[0] > nodes[-1]:
            nodes = tuple(reversed(nodes))
        object.__setattr__(self, 'nodes', nodes)

    @property
    def edges(self) -> FrozenSet[Edge]:
        return path_edges(self.nodes)

    def __str__(self):
        return "-".join(str(v) for v in self.nodes)


@dataclass(frozen=True)
class Metrics:
    pct_od_served: float
    pct_demand_served: float
    pct_time_saved: float

    def to_dict(self) -> Dict[str, float]:
        return {
            'pct_od_served': self.pct_od_served,
            'pct_demand_served': self.pct_demand_served,
            'pct_time_saved': self.pct_time_saved,
        }


@dataclass(frozen=True)
class CommodityOutcome:
    commodity: Commodity
    served: bool
    t_direct: float
    t_prime: float
    demand: float
    profit: float
    hubs: Tuple[int, ...] = ()


@dataclass
class Solution:
    line: Optional[HubLine]
    assignment: Dict[Commodity, Optional[CandidatePath]]
    objective: float
    outcomes: Tuple[CommodityOutcome, ...]
    metrics: Metrics
    stats: Dict[str, float] = field(default_factory=dict)

    @property
    def served(self) -> int:
        return sum(1 for path in self.assignment.values() if path is not None)


class CandidateIndex:
    """Candidati per commodity ordinati per profitto decrescente (pareggi: hub lessicografici)."""

    def __init__(self, instance: Instance, candidates: Mapping[Commodity, Sequence[CandidatePath]]):
        self.commodities: Tuple[Commodity, ...] = instance.commodities
        self.ranked: Dict[Commodity, Tuple[CandidatePath, ...]] = {
            c: tuple(sorted(candidates.get(c, ()), key=lambda path: (-path.profit, path.hubs)))
            for c in self.commodities
        }

    def best_compatible(self, commodity: Commodity, line_edges: FrozenSet[Edge]) -> Optional[CandidatePath]:
        for path in self.ranked[commodity]:
            if path.hub_edges <= line_edges:
                return path
        return None

    def line_value(self, line_edges: FrozenSet[Edge]) -> float:
        total = 0.0
        for commodity in self.commodities:
            best = self.best_compatible(commodity, line_edges)
            if best is not None:
                total += max(best.profit, 0.0)
        return total

    @property
    def total(self) -> int:
        return sum(len(paths) for paths in self.ranked.values())


CandidateSource = Union[CandidateIndex, Mapping[Commodity, Sequence[CandidatePath]]]


def _as_index(instance: Instance, candidates: CandidateSource) -> CandidateIndex:
    if isinstance(candidates, CandidateIndex):
        return candidates
    return CandidateIndex(instance, candidates)


def validate_line(instance: Instance, line: HubLine):
    if len(line.nodes) != instance.params.p:
        raise ContractViolation(f"la linea ha {len(line.nodes)} nodi, attesi p={instance.params.p}")
    for node in line.nodes:
        if not (0 <= node < instance.n):
            raise ContractViolation(f"nodo {node} fuori dall'istanza")
    missing = sorted(line.edges - instance.edges)
    if missing:
        raise ContractViolation(f"archi non candidati nella linea: {missing}")


def _commodity_demand(instance: Instance, commodity: Commodity, t_final: float) -> float:
    o, d = commodity
    if instance.params.demand_model is DemandModel.STATIC:
        t_final = instance.direct_time(commodity)
    return demand(instance.population(o), instance.population(d), t_final, instance.params.r)


def assemble_solution(instance: Instance, line: Optional[HubLine],
                      assignment: Dict[Commodity, Optional[CandidatePath]],
                      time_weighted: bool = True) -> Solution:
    """Costruisce la Solution: esiti per commodity, obiettivo e metriche."""
    outcomes = []
    objective = 0.0
    for commodity in instance.commodities:
        path = assignment.get(commodity)
        t_direct = instance.direct_time(commodity)
        if path is None:
            t_prime, gain, hubs = t_direct, 0.0, ()
        else:
            t_prime, gain, hubs = path.tau, max(path.profit, 0.0), path.hubs
        objective += gain
        outcomes.append(CommodityOutcome(
            commodity=commodity,
            served=path is not None,
            t_direct=t_direct,
            t_prime=t_prime,
            demand=_commodity_demand(instance, commodity, t_prime),
            profit=gain,
            hubs=hubs,
        ))
    solution = Solution(
        line=line,
        assignment={c: assignment.get(c) for c in instance.commodities},
        objective=objective,
        outcomes=tuple(outcomes),
        metrics=Metrics(0.0, 0.0, 0.0),
    )
    solution.metrics = compute_metrics(instance, solution, time_weighted)
    return solution


def evaluate_line(instance: Instance, candidates: CandidateSource, line: HubLine,
                  time_weighted: bool = True) -> Solution:
    validate_line(instance, line)
    index = _as_index(instance, candidates)
    edges = line.edges
    assignment = {c: index.best_compatible(c, edges) for c in instance.commodities}
    return assemble_solution(instance, line, assignment, time_weighted)


def compute_metrics(instance: Instance, solution: Solution, time_weighted: bool = True) -> Metrics:
    outcomes = solution.outcomes
    if not outcomes:
        return Metrics(0.0, 0.0, 0.0)
    served = [o for o in outcomes if o.served]
    total_demand = sum(o.demand for o in outcomes)
    if time_weighted:
        before = sum(o.demand * o.t_direct for o in outcomes)
        after = sum(o.demand * o.t_prime for o in outcomes)
    else:
        before = sum(o.t_direct for o in outcomes)
        after = sum(o.t_prime for o in outcomes)

    def clamp(value: float) -> float:
        return min(100.0, max(0.0, value))

    return Metrics(
        pct_od_served=clamp(100.0 * len(served) / len(outcomes)),
        pct_demand_served=clamp(100.0 * sum(o.demand for o in served) / total_demand) if total_demand > 0 else 0.0,
        pct_time_saved=clamp(100.0 * (before - after) / before) if before > 0 else 0.0,
    )


# --- enumerazione esaustiva -------------------------------------------------

def _adjacency(instance: Instance) -> Dict[int, List[int]]:
    adjacency: Dict[int, List[int]] = {v: [] for v in range(instance.n)}
    for k, m in instance.edges:
        adjacency[k].append(m)
        adjacency[m].append(k)
    for neighbours in adjacency.values():
        neighbours.sort()
    return adjacency


def estimate_line_count(instance: Instance) -> int:
    """Stima (esatta sui grafi completi) del numero di linee canoniche."""
    adjacency = _adjacency(instance)
    degree = max((len(v) for v in adjacency.values()), default=0)
    n, p = instance.n, instance.params.p
    count = n
    for i in range(1, p):
        count *= max(0, min(degree, n - i))
    return count // 2


def iter_canonical_lines(instance: Instance) -> Iterator[Tuple[int, ...]]:
    """Linee canoniche (primo < ultimo) in ordine lessicografico."""
    adjacency = _adjacency(instance)
    p = instance.params.p
    path: List[int] = []
    on_path = set()

    def dfs(node: int):
        path.append(node)
        on_path.add(node)
        if len(path) == p:
            if path[0] < path[-1]:
                yield tuple(path)
        else:
            for nxt in adjacency[node]:
                if nxt not in on_path:
                    yield from dfs(nxt)
        on_path.discard(node)
        path.pop()

    for start in range(instance.n):
        yield from dfs(start)


def _first_line(instance: Instance) -> HubLine:
    for nodes in iter_canonical_lines(instance):
        return HubLine(nodes)
    raise ValidationError(f"nessuna linea con p={instance.params.p} hub sugli archi candidati")


def solve_enumerate(instance: Instance, candidates: CandidateSource,
                    line_cap: int = DEFAULT_LINE_CAP, time_weighted: bool = True) -> Solution:
    estimate = estimate_line_count(instance)
    if estimate > line_cap:
        raise GuardRefusalError(estimate, line_cap)
    index = _as_index(instance, candidates)
    logger.log_solver_action("Enumerazione linee avviata", f"stima {estimate} linee, {index.total} candidati")

    start = time.perf_counter()
    best_nodes: Optional[Tuple[int, ...]] = None
    best_value = -math.inf
    evaluated = 0
    for nodes in iter_canonical_lines(instance):
        evaluated += 1
        value = index.line_value(path_edges(nodes))
        if value > best_value + EPS:
            best_nodes, best_value = nodes, value
    if best_nodes is None:
        raise ValidationError(f"nessuna linea con p={instance.params.p} hub sugli archi candidati")

    solution = evaluate_line(instance, index, HubLine(best_nodes), time_weighted)
    solution.stats = {'lines_evaluated': evaluated, 't_solve': time.perf_counter() - start}
    logger.log_solver_action(
        "✓ Enumerazione completata",
        f"{evaluated} linee, obiettivo={solution.objective:.6g}, linea={solution.line}"
    )
    return solution


# --- branch-and-bound -------------------------------------------------------

@dataclass
class _SearchNode:
    path: Tuple[int, ...]
    excluded: FrozenSet[Edge]
    live: Tuple[Tuple[CandidatePath, ...], ...]
    bound: float


def _compatible(path_info, excluded: FrozenSet[Edge], candidate: CandidatePath, p: int) -> bool:
    """Condizione necessaria: il candidato può stare in un completamento della linea parziale."""
    path_nodes, path_edge_set, degree = path_info
    if candidate.hub_edges & excluded:
        return False
    nodes = path_nodes | set(candidate.hubs)
    if len(nodes) > p:
        return False
    new_edges = [e for e in candidate.hub_edges if e not in path_edge_set]
    if not new_edges:
        return True
    deg = dict(degree)
    parent = {v: v for v in nodes}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in path_edge_set:
        parent[find(a)] = find(b)
    for a, b in new_edges:
        deg[a] = deg.get(a, 0) + 1
        deg[b] = deg.get(b, 0) + 1
        if deg[a] > 2 or deg[b] > 2:
            return False
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
    return True


def _path_info(path: Tuple[int, ...]):
    edges = path_edges(path)
    degree: Dict[int, int] = {}
    for a, b in edges:
        degree[a] = degree.get(a, 0) + 1
        degree[b] = degree.get(b, 0) + 1
    return set(path), edges, degree


def _node_bound(live: Tuple[Tuple[CandidatePath, ...], ...], caps: Sequence[float]) -> float:
    total = 0.0
    for paths, cap in zip(live, caps):
        if paths:
            total += min(cap, max(paths[0].profit, 0.0))
    return total


def solve_bnb(instance: Instance, candidates: CandidateSource,
              bounds: Mapping[Commodity, CommodityBound],
              node_cap: int = DEFAULT_BNB_NODE_CAP, time_weighted: bool = True) -> Solution:
    """
    Branch-and-bound best-first.

    Un nodo è una linea parziale più un insieme di archi esclusi; il
    branching prende il più piccolo arco candidato che estende un estremo
    e genera i figli "includi" ed "escludi".
    """
    index = _as_index(instance, candidates)
    p = instance.params.p
    commodities = instance.commodities
    caps = [bounds[c].ub if c in bounds else math.inf for c in commodities]
    root_live = tuple(
        tuple(path for path in index.ranked[c] if path.profit > 0) for c in commodities
    )
    root_bound = _node_bound(root_live, caps)
    start = time.perf_counter()
    logger.log_solver_action("Branch-and-bound avviato", f"bound radice={root_bound:.6g}")

    if root_bound <= EPS:
        solution = evaluate_line(instance, index, _first_line(instance), time_weighted)
        solution.stats = {'expanded': 0, 'root_bound': root_bound, 't_solve': time.perf_counter() - start}
        return solution

    sorted_edges = sorted(instance.edges)
    adjacency = _adjacency(instance)
    counter = itertools.count()
    heap = [(-root_bound, next(counter), _SearchNode((), frozenset(), root_live, root_bound))]
    incumbent_value = -math.inf
    incumbent_nodes: Optional[Tuple[int, ...]] = None
    expanded = 0

    def push(path, excluded, live):
        bound = _node_bound(live, caps)
        if bound > incumbent_value + EPS:
            heapq.heappush(heap, (-bound, next(counter), _SearchNode(path, excluded, live, bound)))

    while heap:
        negative_bound, _, node = heapq.heappop(heap)
        if -negative_bound <= incumbent_value + EPS:
            break
        expanded += 1
        if expanded > node_cap:
            raise NodeLimitError(expanded)

        if len(node.path) == p:
            value = index.line_value(path_edges(node.path))
            if value > incumbent_value + EPS or (
                    abs(value - incumbent_value) <= EPS and HubLine(node.path).nodes < HubLine(incumbent_nodes).nodes):
                incumbent_value, incumbent_nodes = value, node.path
            continue

        edge = _next_extension(node.path, node.excluded, sorted_edges, adjacency)
        if edge is None:
            continue
        if not node.path:
            grown = edge
        elif node.path[0] in edge:
            other = edge[0] if edge[1] == node.path[0] else edge[1]
            grown = (other,) + node.path
        else:
            other = edge[0] if edge[1] == node.path[-1] else edge[1]
            grown = node.path + (other,)
        info = _path_info(grown)
        included_live = tuple(
            tuple(path for path in paths if _compatible(info, node.excluded, path, p)) for paths in node.live
        )
        push(grown, node.excluded, included_live)

        excluded = node.excluded | {edge}
        excluded_live = tuple(
            tuple(path for path in paths if edge not in path.hub_edges) for paths in node.live
        )
        push(node.path, excluded, excluded_live)

    if incumbent_nodes is None:
        raise ValidationError(f"nessuna linea con p={p} hub sugli archi candidati")
    solution = evaluate_line(instance, index, HubLine(incumbent_nodes), time_weighted)
    solution.stats = {'expanded': expanded, 'root_bound': root_bound, 't_solve': time.perf_counter() - start}
    logger.log_solver_action(
        "✓ Branch-and-bound completato",
        f"{expanded} nodi espansi, obiettivo={solution.objective:.6g}, linea={solution.line}"
    )
    return solution


def _next_extension(path: Tuple[int, ...], excluded: FrozenSet[Edge],
                    sorted_edges: Sequence[Edge], adjacency: Dict[int, List[int]]) -> Optional[Edge]:
    """Più piccolo arco non escluso che estende la linea parziale a un estremo."""
    if not path:
        for edge in sorted_edges:
            if edge not in excluded:
                return edge
        return None
    on_path = set(path)
    options = []
    for end in {path[0], path[-1]}:
        for other in adjacency[end]:
            if other in on_path:
                continue
            edge = (min(end, other), max(end, other))
            if edge not in excluded:
                options.append(edge)
    return min(options) if options else None
