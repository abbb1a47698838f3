"""
Generazione dei cammini candidati per commodity.

- k_shortest_simple_paths: cammini semplici o -> d in ordine di tempo
  (pareggi in ordine lessicografico dei nodi), con limite k_cap.
- commodity_upper_bound: bound ammissibile f_c(t_LB) dal primo cammino
  migliorativo con al più p hub.
- enumerate_candidates: tutti i cammini con al più p + 1 archi, tempo
  migliorativo, non dominati da una scorciatoia a due hub.
- enumerate_all / compute_all_bounds: orchestrazione per commodity su
  un pool di processi; l'output non dipende dal numero di worker.
"""

import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, FrozenSet, Iterator, List, Optional, Tuple

import networkx as nx

from config.settings import DEFAULT_K_CAP, DEFAULT_WORKERS, EPS
from core.auxgraph import (
    ArcKind, AuxGraph, build_aux_graph, describe, optional_dot_dump, resolved_hubs,
)
from core.errors import CappedEnumerationError
from core.gravity import ProfitTerm, path_time, profit, static_profit
from core.logger import logger
from core.model import Commodity, DemandModel, DerivedTimes, Edge, Instance, derive_times


class PathType(Enum):
    """Tassonomia: origine e/o destinazione sono hub?"""
    ODH = "ODH"
    DH = "DH"
    OH = "OH"
    ODNH = "ODNH"


def classify_path(commodity: Commodity, hubs: Tuple[int, ...]) -> PathType:
    o, d = commodity
    origin_hub = hubs[0] == o
    destination_hub = hubs[-1] == d
    if origin_hub and destination_hub:
        return PathType.ODH
    if origin_hub:
        return PathType.OH
    if destination_hub:
        return PathType.DH
    return PathType.ODNH


def path_edges(hubs: Tuple[int, ...]) -> FrozenSet[Edge]:
    return frozenset((min(a, b), max(a, b)) for a, b in zip(hubs, hubs[1:]))


@dataclass(frozen=True)
class CandidatePath:
    commodity: Commodity
    hubs: Tuple[int, ...]
    tau: float
    profit: float
    ptype: PathType
    hub_edges: FrozenSet[Edge] = field(compare=False)

    @property
    def sort_key(self):
        return (self.tau, self.hubs)

    @property
    def hub_count(self) -> int:
        return len(self.hubs)


@dataclass(frozen=True)
class CommodityBound:
    commodity: Commodity
    ub: float
    witness: Optional[CandidatePath] = None
    capped: bool = False


@dataclass
class EnumerationStats:
    n_path: int = 0
    t_path: float = 0.0
    n_commodities: int = 0
    workers: int = 1
    per_type: Dict[str, int] = field(default_factory=lambda: {t.value: 0 for t in PathType})
    errors: Dict[Commodity, str] = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {
            'n_path': self.n_path,
            't_path': self.t_path,
            'n_commodities': self.n_commodities,
            'workers': self.workers,
            'per_type': dict(self.per_type),
            'errors': {f"{o}-{d}": msg for (o, d), msg in self.errors.items()},
        }


# --- profitto e filtri ------------------------------------------------------

def profit_term(instance: Instance, commodity: Commodity) -> ProfitTerm:
    o, d = commodity
    return ProfitTerm(
        R=instance.revenue_of(commodity),
        Po=instance.population(o),
        Pd=instance.population(d),
        t_direct=instance.direct_time(commodity),
        r=instance.params.r,
    )


def path_profit(instance: Instance, commodity: Commodity, tau: float) -> float:
    term = profit_term(instance, commodity)
    if instance.params.demand_model is DemandModel.STATIC:
        return static_profit(term, tau)
    return profit(term, tau)


def is_improving(tau: float, t_direct: float, strict: bool = True) -> bool:
    if strict:
        return tau < t_direct - EPS
    return tau <= t_direct + EPS


def candidate_time(instance: Instance, derived: DerivedTimes, commodity: Commodity,
                   hubs: Tuple[int, ...]) -> float:
    o, d = commodity
    return path_time(o, hubs, d, instance.time, derived, instance.params.alpha)


def make_candidate(instance: Instance, derived: DerivedTimes, commodity: Commodity,
                   hubs: Tuple[int, ...], tau: Optional[float] = None) -> CandidatePath:
    """Costruisce il candidato; il tempo deve essere già migliorativo."""
    hubs = tuple(hubs)
    if tau is None:
        tau = candidate_time(instance, derived, commodity, hubs)
    return CandidatePath(
        commodity=tuple(commodity),
        hubs=hubs,
        tau=tau,
        profit=path_profit(instance, commodity, tau),
        ptype=classify_path(commodity, hubs),
        hub_edges=path_edges(hubs),
    )


def shortcut_times(instance: Instance, derived: DerivedTimes, commodity: Commodity,
                   hubs: Tuple[int, ...]) -> List[float]:
    """Tempo della scorciatoia o -> i -> j -> d per ogni arco hub (i, j) del cammino."""
    o, d = commodity
    t = instance.time
    alpha = instance.params.alpha
    return [
        float(t[o, a]) + derived.access[a] + alpha * float(t[a, b]) + derived.exit[b] + float(t[b, d])
        for a, b in zip(hubs, hubs[1:])
    ]


def is_dominated(instance: Instance, derived: DerivedTimes, commodity: Commodity,
                 hubs: Tuple[int, ...], tau: float) -> bool:
    """Vero se una scorciatoia a due hub diversa dal cammino stesso non è più lenta."""
    if len(hubs) == 2 and instance.params.selfloop_dominance_exempt:
        return False
    return any(sc <= tau + EPS for sc in shortcut_times(instance, derived, commodity, hubs))


# --- k cammini minimi -------------------------------------------------------

def k_shortest_simple_paths(aux: AuxGraph, k_cap: int = DEFAULT_K_CAP) -> Iterator[Tuple[Tuple[int, ...], float]]:
    """
    Cammini semplici o -> d per tempo non decrescente.

    A parità di tempo (entro EPS) i cammini escono in ordine lessicografico
    della sequenza di nodi. Chiedere il cammino k_cap + 1 solleva
    CappedEnumerationError.
    """
    if aux.is_empty:
        return
    weights = {(arc.tail, arc.head): arc.time for arc in aux.arcs}
    graph = aux.to_networkx()

    def cost(path) -> float:
        return sum(weights[(u, v)] for u, v in zip(path, path[1:]))

    yielded = 0
    group: List[Tuple[Tuple[int, ...], float]] = []
    group_cost = 0.0
    stream = nx.shortest_simple_paths(graph, aux.origin, aux.destination, weight='weight')
    try:
        for raw in stream:
            path = tuple(raw)
            c = cost(path)
            if group and c > group_cost + EPS:
                for item in sorted(group):
                    if yielded >= k_cap:
                        raise CappedEnumerationError(yielded)
                    yield item
                    yielded += 1
                group = []
            if not group:
                group_cost = c
            group.append((path, c))
            if len(group) > k_cap:
                raise CappedEnumerationError(yielded)
    except nx.NetworkXNoPath:
        pass
    for item in sorted(group):
        if yielded >= k_cap:
            raise CappedEnumerationError(yielded)
        yield item
        yielded += 1


def commodity_upper_bound(instance: Instance, aux: AuxGraph, commodity: Commodity,
                          derived: Optional[DerivedTimes] = None,
                          k_cap: int = DEFAULT_K_CAP) -> CommodityBound:
    """Bound f_c(t_LB) dal primo cammino migliorativo con al più p hub."""
    derived = derived or derive_times(instance)
    t_od = instance.direct_time(commodity)
    strict = instance.params.strict_filter
    p = instance.params.p

    ub = 0.0
    witness = None
    best_seen: Optional[float] = None
    try:
        for path, cost in k_shortest_simple_paths(aux, k_cap):
            hubs = resolved_hubs(aux, path)
            tau = candidate_time(instance, derived, commodity, hubs) if len(hubs) >= 2 else cost
            if best_seen is None:
                best_seen = tau
            # flusso ordinato per tempo: nessun cammino successivo migliora
            if not is_improving(tau, t_od, strict):
                ub, witness = 0.0, None
                break
            if len(hubs) < 2:
                # o -> i -> d non è un cammino sulla linea
                continue
            ub = path_profit(instance, commodity, tau)
            if len(hubs) <= p:
                witness = make_candidate(instance, derived, commodity, hubs, tau)
                break
    except CappedEnumerationError as e:
        fallback = 0.0
        if best_seen is not None and is_improving(best_seen, t_od, strict):
            fallback = path_profit(instance, commodity, best_seen)
        logger.warning(
            f"⚠ [PATHS] k_cap raggiunto per la commodity {commodity} dopo {e.count} cammini: "
            f"bound conservativo {fallback:.6g}"
        )
        return CommodityBound(commodity=tuple(commodity), ub=fallback, witness=None, capped=True)
    return CommodityBound(commodity=tuple(commodity), ub=max(ub, 0.0), witness=witness)


# --- enumerazione completa --------------------------------------------------

def enumerate_candidates(instance: Instance, aux: AuxGraph, commodity: Commodity,
                         derived: Optional[DerivedTimes] = None) -> List[CandidatePath]:
    """Tutti i cammini candidati della commodity, ordinati per (tau, hub)."""
    if aux.is_empty:
        return []
    derived = derived or derive_times(instance)
    params = instance.params
    o, d = commodity
    t_od = instance.direct_time(commodity)
    cutoff = t_od + EPS
    p = params.p
    alpha = params.alpha
    t = instance.time.tolist()
    access, exit_ = derived.access, derived.exit
    resolve = aux.resolve

    def shortcut(a: int, b: int) -> float:
        return t[o][a] + access[a] + alpha * t[a][b] + exit_[b] + t[b][d]

    found: List[CandidatePath] = []
    path: List[int] = [o]
    visited = {o}

    def record():
        hubs = tuple(resolve(node) for node in path[1:])
        if len(hubs) < 2:
            return
        tau = candidate_time(instance, derived, commodity, hubs)
        if not is_improving(tau, t_od, params.strict_filter):
            return
        if is_dominated(instance, derived, commodity, hubs, tau):
            return
        found.append(make_candidate(instance, derived, commodity, hubs, tau))

    def extend(node: int, partial: float, best_shortcut: float):
        for arc in aux.successors(node):
            head = arc.head
            if head in visited:
                continue
            if arc.kind is ArcKind.EXIT:
                if partial + arc.time <= cutoff:
                    record()
                continue
            # hub dopo l'aggiunta: len(path)
            if len(path) > p:
                continue
            reached = partial + arc.time
            if reached > cutoff:
                continue
            shortest = best_shortcut
            if arc.kind is ArcKind.HUB:
                shortest = min(best_shortcut, shortcut(resolve(node), resolve(head)))
                # ogni completamento con almeno tre hub è dominato
                if len(path) >= 3 and shortest <= reached:
                    continue
            path.append(head)
            visited.add(head)
            extend(head, reached, shortest)
            visited.discard(head)
            path.pop()

    extend(o, 0.0, float('inf'))
    found.sort(key=lambda c: c.sort_key)
    return found


# --- orchestrazione parallela -----------------------------------------------

def _enumerate_task(instance: Instance, derived: DerivedTimes, commodity: Commodity,
                    dump_dir) -> Tuple[Commodity, List[CandidatePath], Optional[str]]:
    """Worker per singola commodity; ritorna (commodity, risultato, errore)."""
    try:
        aux = build_aux_graph(instance, derived, commodity)
        optional_dot_dump(aux, dump_dir)
        return commodity, enumerate_candidates(instance, aux, commodity, derived), None
    except Exception as e:
        return commodity, [], f"{type(e).__name__}: {e}"


def _bound_task(instance: Instance, derived: DerivedTimes, commodity: Commodity,
                k_cap: int) -> Tuple[Commodity, Optional[CommodityBound], Optional[str]]:
    try:
        aux = build_aux_graph(instance, derived, commodity)
        return commodity, commodity_upper_bound(instance, aux, commodity, derived, k_cap), None
    except Exception as e:
        return commodity, None, f"{type(e).__name__}: {e}"


def _run_per_commodity(task: Callable, instance: Instance, derived: DerivedTimes,
                       workers: int, extra) -> Tuple[Dict[Commodity, object], Dict[Commodity, str]]:
    results: Dict[Commodity, object] = {}
    errors: Dict[Commodity, str] = {}
    commodities = list(instance.commodities)

    if workers <= 1 or len(commodities) <= 1:
        outcomes = (task(instance, derived, c, extra) for c in commodities)
        for commodity, result, error in outcomes:
            if error:
                errors[commodity] = error
            else:
                results[commodity] = result
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = {executor.submit(task, instance, derived, c, extra): c for c in commodities}
            for future in as_completed(futures):
                commodity = futures[future]
                try:
                    _, result, error = future.result()
                except Exception as e:
                    result, error = None, f"{type(e).__name__}: {e}"
                if error:
                    errors[commodity] = error
                else:
                    results[commodity] = result

    # merge in ordine di commodity, indipendente dallo scheduling
    ordered = {c: results[c] for c in commodities if c in results}
    ordered_errors = {c: errors[c] for c in commodities if c in errors}
    for commodity, error in ordered_errors.items():
        logger.log_error(f"✗ [PATHS] Commodity {commodity} fallita: {error}")
    return ordered, ordered_errors


def enumerate_all(instance: Instance, workers: Optional[int] = None,
                  derived: Optional[DerivedTimes] = None,
                  dump_aux_dir=None) -> Tuple[Dict[Commodity, List[CandidatePath]], EnumerationStats]:
    """Cammini candidati di tutte le commodity, più statistiche (n_path, t_path)."""
    workers = DEFAULT_WORKERS if workers is None else max(1, int(workers))
    derived = derived or derive_times(instance)
    logger.log_paths_action(
        "Generazione cammini avviata",
        f"{len(instance.commodities)} commodity, p={instance.params.p}, "
        f"alpha={instance.params.alpha}, worker={workers}"
    )
    start = time.perf_counter()
    candidates, errors = _run_per_commodity(_enumerate_task, instance, derived, workers, dump_aux_dir)
    stats = EnumerationStats(
        n_commodities=len(instance.commodities),
        workers=workers,
        errors=errors,
    )
    for paths in candidates.values():
        stats.n_path += len(paths)
        for candidate in paths:
            stats.per_type[candidate.ptype.value] += 1
    stats.t_path = time.perf_counter() - start
    logger.log_paths_action(
        "✓ Generazione cammini completata",
        f"n_path={stats.n_path}, t_path={stats.t_path:.3f}s, tipi={stats.per_type}"
    )
    return candidates, stats


def compute_all_bounds(instance: Instance, workers: Optional[int] = None,
                       derived: Optional[DerivedTimes] = None,
                       k_cap: int = DEFAULT_K_CAP) -> Dict[Commodity, CommodityBound]:
    """Bound di tutte le commodity; una commodity fallita riceve un bound infinito."""
    workers = DEFAULT_WORKERS if workers is None else max(1, int(workers))
    derived = derived or derive_times(instance)
    bounds, errors = _run_per_commodity(_bound_task, instance, derived, workers, k_cap)
    for commodity in errors:
        bounds[commodity] = CommodityBound(commodity=commodity, ub=float('inf'), capped=True)
    ordered = {c: bounds[c] for c in instance.commodities}
    capped = sum(1 for b in ordered.values() if b.capped)
    logger.log_paths_action(
        "✓ Bound calcolati",
        f"{len(ordered)} commodity, somma={sum(b.ub for b in ordered.values()):.6g}, limitati={capped}"
    )
    return ordered


def aux_summary(instance: Instance, derived: DerivedTimes, commodity: Commodity) -> Dict[str, int]:
    return describe(build_aux_graph(instance, derived, commodity))
