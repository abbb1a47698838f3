"""
Grafo ausiliario per commodity.

Per la commodity (o, d) i nodi sono quelli originali più due copie:
O' = n (l'origine usata come hub) e D' = n + 1 (la destinazione usata
come hub). Gli archi sono di tre tipi:

- access: o -> i, tempo t_oi + accesso_i (per O': solo accesso_o)
- hub:    i -> j, tempo alpha * t_ij, solo su archi hub candidati
- exit:   j -> d, tempo t_jd + uscita_j (per D': solo uscita_d)

Nessun arco entra in o o in O' (se non da o), nessun arco esce da d,
D' ha un solo successore: d.
"""

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import networkx as nx

from config.settings import EPS
from core.model import Commodity, DerivedTimes, Instance


class ArcKind(Enum):
    ACCESS = "access"
    HUB = "hub"
    EXIT = "exit"


@dataclass(frozen=True)
class AuxArc:
    tail: int
    head: int
    time: float
    kind: ArcKind


@dataclass(frozen=True)
class AuxGraph:
    commodity: Commodity
    n_original: int
    nodes: Tuple[int, ...]
    arcs: Tuple[AuxArc, ...]
    _successors: Dict[int, Tuple[AuxArc, ...]] = field(init=False, default_factory=dict,
                                                       repr=False, compare=False)

    def __post_init__(self):
        successors: Dict[int, List[AuxArc]] = {node: [] for node in self.nodes}
        for arc in self.arcs:
            successors[arc.tail].append(arc)
        object.__setattr__(self, '_successors', {k: tuple(v) for k, v in successors.items()})

    @property
    def origin(self) -> int:
        return self.commodity[0]

    @property
    def destination(self) -> int:
        return self.commodity[1]

    @property
    def origin_copy(self) -> int:
        return self.n_original

    @property
    def destination_copy(self) -> int:
        return self.n_original + 1

    @property
    def is_empty(self) -> bool:
        return not self.arcs

    def resolve(self, node: int) -> int:
        """Riporta le copie O'/D' ai nodi originali."""
        if node == self.origin_copy:
            return self.origin
        if node == self.destination_copy:
            return self.destination
        return node

    def successors(self, node: int) -> Tuple[AuxArc, ...]:
        return self._successors.get(node, ())

    def arcs_of_kind(self, kind: ArcKind) -> Tuple[AuxArc, ...]:
        return tuple(arc for arc in self.arcs if arc.kind is kind)

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.nodes)
        for arc in self.arcs:
            graph.add_edge(arc.tail, arc.head, weight=arc.time, kind=arc.kind.value)
        return graph

    def node_name(self, node: int) -> str:
        if node == self.origin_copy:
            return f"{self.origin}'"
        if node == self.destination_copy:
            return f"{self.destination}'"
        return str(node)

    def to_dot(self) -> str:
        """Dump DOT per il debug (nodi e archi con tempi)."""
        o, d = self.commodity
        lines = [f'digraph G_{o}_{d} {{', '  rankdir=LR;']
        for node in self.nodes:
            shape = 'doublecircle' if node in (o, d) else 'circle'
            lines.append(f'  "{self.node_name(node)}" [shape={shape}];')
        for arc in self.arcs:
            style = 'bold' if arc.kind is ArcKind.HUB else 'solid'
            lines.append(
                f'  "{self.node_name(arc.tail)}" -> "{self.node_name(arc.head)}" '
                f'[label="{arc.time:.6g}", kind={arc.kind.value}, style={style}];'
            )
        lines.append('}')
        return "\n".join(lines) + "\n"


def build_aux_graph(instance: Instance, derived: DerivedTimes, commodity: Commodity,
                    prune: bool = True) -> AuxGraph:
    """
    Costruisce G_c. Con prune=False restituisce il grafo strutturale completo
    (nessun test di ammissione, nessuna potatura per grado).
    """
    instance.commodity_index(commodity)
    o, d = commodity
    n = instance.n
    o_copy, d_copy = n, n + 1
    t = instance.time
    t_od = float(t[o, d])
    limit = t_od + EPS
    alpha = instance.params.alpha

    def resolve(node: int) -> int:
        if node == o_copy:
            return o
        if node == d_copy:
            return d
        return node

    hub_capable = [k for k in range(n) if k not in (o, d)] + [o_copy, d_copy]

    hub_arcs: Dict[Tuple[int, int], float] = {}
    for u in hub_capable:
        if u == d_copy:
            continue
        for v in hub_capable:
            if v == u or v == o_copy:
                continue
            a, b = resolve(u), resolve(v)
            if (min(a, b), max(a, b)) not in instance.edges:
                continue
            hub_time = alpha * float(t[a, b])
            if prune and hub_time > limit:
                continue
            hub_arcs[(u, v)] = hub_time

    outgoing: Dict[int, List[Tuple[int, float]]] = {}
    incoming: Dict[int, List[Tuple[int, float]]] = {}
    for (u, v), hub_time in hub_arcs.items():
        outgoing.setdefault(u, []).append((v, hub_time))
        incoming.setdefault(v, []).append((u, hub_time))

    arcs: Dict[Tuple[int, int], AuxArc] = {}
    for u in hub_capable:
        if u == d_copy:
            continue
        k = resolve(u)
        access_time = (0.0 if u == o_copy else float(t[o, k])) + derived.access[k]
        # ammissione esistenziale: basta un partner j
        if prune and not any(access_time + hub_time <= limit for _, hub_time in outgoing.get(u, ())):
            continue
        arcs[(o, u)] = AuxArc(o, u, access_time, ArcKind.ACCESS)

    for v in hub_capable:
        if v == o_copy:
            continue
        k = resolve(v)
        exit_time = (0.0 if v == d_copy else float(t[k, d])) + derived.exit[k]
        if prune and not any(hub_time + exit_time <= limit for _, hub_time in incoming.get(v, ())):
            continue
        arcs[(v, d)] = AuxArc(v, d, exit_time, ArcKind.EXIT)

    for (u, v), hub_time in hub_arcs.items():
        arcs[(u, v)] = AuxArc(u, v, hub_time, ArcKind.HUB)

    if prune:
        arcs = _prune_by_degree(arcs, o, d)

    nodes = sorted({o, d} | {a.tail for a in arcs.values()} | {a.head for a in arcs.values()}) if arcs else []
    ordered = tuple(arcs[key] for key in sorted(arcs))
    return AuxGraph(commodity=(o, d), n_original=n, nodes=tuple(nodes), arcs=ordered)


def _prune_by_degree(arcs: Dict[Tuple[int, int], AuxArc], o: int, d: int) -> Dict[Tuple[int, int], AuxArc]:
    """Rimuove fino a punto fisso i nodi interni senza archi entranti o uscenti."""
    arcs = dict(arcs)
    while True:
        in_deg: Dict[int, int] = {}
        out_deg: Dict[int, int] = {}
        for tail, head in arcs:
            out_deg[tail] = out_deg.get(tail, 0) + 1
            in_deg[head] = in_deg.get(head, 0) + 1
        if out_deg.get(o, 0) == 0 or in_deg.get(d, 0) == 0:
            return {}
        nodes = set(in_deg) | set(out_deg)
        dead = {
            node for node in nodes
            if node not in (o, d) and (in_deg.get(node, 0) == 0 or out_deg.get(node, 0) == 0)
        }
        if not dead:
            return arcs
        arcs = {key: arc for key, arc in arcs.items() if key[0] not in dead and key[1] not in dead}


def shortcut_time(instance: Instance, derived: DerivedTimes, commodity: Commodity,
                  first: int, second: int) -> float:
    """Tempo del cammino a due hub o -> first -> second -> d (nodi originali)."""
    o, d = commodity
    t = instance.time
    return (float(t[o, first]) + derived.access[first] + instance.params.alpha * float(t[first, second])
            + derived.exit[second] + float(t[second, d]))


def hub_count(aux: AuxGraph, path: Tuple[int, ...]) -> int:
    """Hub distinti di un cammino o..d del grafo ausiliario (copie risolte)."""
    return len({aux.resolve(node) for node in path[1:-1]})


def resolved_hubs(aux: AuxGraph, path: Tuple[int, ...]) -> Tuple[int, ...]:
    return tuple(aux.resolve(node) for node in path[1:-1])


def describe(aux: AuxGraph) -> Dict[str, int]:
    """Conteggi per il log: nodi e archi per tipo."""
    counts = {'nodes': len(aux.nodes)}
    for kind in ArcKind:
        counts[kind.value] = sum(1 for arc in aux.arcs if arc.kind is kind)
    return counts


def optional_dot_dump(aux: AuxGraph, directory) -> Optional[str]:
    """Scrive il DOT in directory/aux_<o>_<d>.dot se directory è impostata."""
    if directory is None:
        return None
    target = Path(directory)
    target.mkdir(parents=True, exist_ok=True)
    o, d = aux.commodity
    path = target / f"aux_{o}_{d}.dot"
    path.write_text(aux.to_dot(), encoding='utf-8')
    return str(path)
