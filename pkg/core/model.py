"""
Rappresentazione dell'istanza e derivazione dei parametri.

Un'istanza è immutabile: ogni trasformazione (chiusura metrica,
ricavi, sparsificazione) restituisce una nuova istanza tramite
dataclasses.replace, quindi può essere condivisa tra processi.
"""

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, FrozenSet, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from config.settings import (
    EPS, REVENUE_SEED_OFFSET, SPARSIFY_SEED_OFFSET, SPARSIFY_TRIM_FRACTION,
)
from core.errors import ContractViolation, ValidationError
from core.logger import logger
from core.prng import SplitMix64, derive_seed

Commodity = Tuple[int, int]
Edge = Tuple[int, int]


class DemandModel(Enum):
    """Domanda elastica (gravitazionale sul tempo realizzato) o statica."""
    ELASTIC = "elastic"
    STATIC = "static"


@dataclass(frozen=True)
class Node:
    id: int
    label: str
    population: float
    lon: Optional[float] = None
    lat: Optional[float] = None

    @property
    def has_coordinates(self) -> bool:
        return self.lon is not None and self.lat is not None


@dataclass(frozen=True)
class GammaRule:
    """R_c = (1 + gamma_c) t_od con gamma_c uniforme da SplitMix64(seed + 1)."""
    seed: int


@dataclass(frozen=True)
class ExplicitRevenue:
    """Ricavi R_c forniti dal file, uno per commodity nell'ordine delle commodity."""
    values: Tuple[float, ...]


RevenueSpec = Union[GammaRule, ExplicitRevenue]


@dataclass(frozen=True)
class Params:
    p: int
    alpha: float
    r: float
    vartheta: float
    revenue: RevenueSpec
    strict_filter: bool = True
    selfloop_dominance_exempt: bool = True
    demand_model: DemandModel = DemandModel.ELASTIC

    def __post_init__(self):
        if self.p < 2:
            raise ValidationError(f"p deve essere >= 2 (ricevuto {self.p})")
        if not (0.0 < self.alpha <= 1.0):
            raise ValidationError(f"alpha deve stare in (0,1] (ricevuto {self.alpha})")
        if self.r <= 0.0:
            raise ValidationError(f"r deve essere > 0 (ricevuto {self.r})")
        if self.vartheta < 0.0:
            raise ValidationError(f"vartheta deve essere >= 0 (ricevuto {self.vartheta})")
        if isinstance(self.revenue, ExplicitRevenue) and any(v < 0 for v in self.revenue.values):
            raise ValidationError("i ricavi espliciti devono essere >= 0")

    def to_dict(self) -> Dict:
        data = {
            'p': self.p,
            'alpha': self.alpha,
            'r': self.r,
            'vartheta': self.vartheta,
            'strict_filter': self.strict_filter,
            'selfloop_dominance_exempt': self.selfloop_dominance_exempt,
            'demand_model': self.demand_model.value,
        }
        if isinstance(self.revenue, GammaRule):
            data['revenue'] = {'mode': 'gamma', 'seed': self.revenue.seed}
        else:
            data['revenue'] = {'mode': 'explicit', 'values': list(self.revenue.values)}
        return data


@dataclass(frozen=True)
class DerivedTimes:
    """Tempi di accesso e uscita per nodo."""
    access: Tuple[float, ...]
    exit: Tuple[float, ...]


@dataclass(frozen=True, eq=False)
class Instance:
    nodes: Tuple[Node, ...]
    edges: FrozenSet[Edge]
    time: np.ndarray
    commodities: Tuple[Commodity, ...]
    params: Params
    revenues: Optional[Tuple[float, ...]] = None
    closed: bool = False
    _index: Dict[Commodity, int] = field(init=False, default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.nodes)
        if n < 2:
            raise ValidationError("servono almeno 2 nodi")
        for position, node in enumerate(self.nodes):
            if node.id != position:
                raise ValidationError(f"id dei nodi non densi: atteso {position}, trovato {node.id}")
            if not node.population > 0:
                raise ValidationError(f"popolazione non positiva per il nodo {node.id} ({node.label})")
        if not (2 <= self.params.p <= n):
            raise ValidationError(f"p={self.params.p} fuori da [2, {n}]")

        time = np.array(self.time, dtype=float)
        if time.shape != (n, n):
            raise ValidationError(f"matrice dei tempi {time.shape} incompatibile con {n} nodi")
        if np.any(np.abs(np.diag(time)) > EPS):
            raise ValidationError("la diagonale dei tempi deve essere nulla")
        off = ~np.eye(n, dtype=bool)
        if np.any(time[off] <= 0):
            i, j = np.argwhere((time <= 0) & off)[0]
            raise ValidationError(f"tempo non positivo tra {i} e {j}")
        finite = np.isfinite(time)
        if not np.array_equal(finite, finite.T) or np.any(np.abs(time[finite] - time.T[finite]) > EPS):
            raise ValidationError("la matrice dei tempi deve essere simmetrica")
        time.setflags(write=False)
        object.__setattr__(self, 'time', time)

        for k, m in self.edges:
            if not (0 <= k < m < n):
                raise ValidationError(f"arco hub non valido [{k},{m}]")

        index = {}
        for position, (o, d) in enumerate(self.commodities):
            if o == d or not (0 <= o < n and 0 <= d < n):
                raise ValidationError(f"commodity non valida ({o},{d})")
            if (o, d) in index:
                raise ValidationError(f"commodity duplicata ({o},{d})")
            index[(o, d)] = position
        object.__setattr__(self, '_index', index)

        if self.revenues is not None and len(self.revenues) != len(self.commodities):
            raise ValidationError("numero di ricavi diverso dal numero di commodity")

    @property
    def n(self) -> int:
        return len(self.nodes)

    def commodity_index(self, commodity: Commodity) -> int:
        try:
            return self._index[tuple(commodity)]
        except KeyError:
            raise ContractViolation(f"commodity {commodity} non presente nell'istanza") from None

    def revenue_of(self, commodity: Commodity) -> float:
        if self.revenues is None:
            raise ContractViolation("ricavi non ancora risolti: usare resolve_revenues")
        return self.revenues[self.commodity_index(commodity)]

    def direct_time(self, commodity: Commodity) -> float:
        o, d = commodity
        return float(self.time[o, d])

    def population(self, node: int) -> float:
        return self.nodes[node].population

    def sorted_edges(self) -> Tuple[Edge, ...]:
        return tuple(sorted(self.edges))


def all_pairs(n: int) -> FrozenSet[Edge]:
    return frozenset((k, m) for k in range(n) for m in range(k + 1, n))


def default_commodities(n: int, ordered: bool = False) -> Tuple[Commodity, ...]:
    if ordered:
        return tuple((i, j) for i in range(n) for j in range(n) if i != j)
    return tuple((i, j) for i in range(n) for j in range(i + 1, n))


def metric_closure(instance: Instance) -> Instance:
    """Sostituisce ogni t_ij con il tempo di cammino minimo (Floyd-Warshall)."""
    n = instance.n
    graph = nx.Graph()
    graph.add_nodes_from(range(n))
    rows, cols = np.nonzero(np.isfinite(instance.time))
    graph.add_weighted_edges_from(
        (int(i), int(j), float(instance.time[i, j])) for i, j in zip(rows, cols) if i < j
    )
    closed = np.asarray(nx.floyd_warshall_numpy(graph, nodelist=range(n), weight='weight'), dtype=float)
    if not np.all(np.isfinite(closed)):
        i, j = np.argwhere(~np.isfinite(closed))[0]
        raise ValidationError(f"rete non connessa: nessun cammino tra {i} e {j}")
    # mai aumentare un valore esistente
    closed = np.minimum(closed, instance.time)
    np.fill_diagonal(closed, 0.0)
    return replace(instance, time=closed, closed=True)


def check_triangle_inequality(time: np.ndarray, tol: float = EPS) -> bool:
    shortest = np.min(time[:, :, None] + time[None, :, :], axis=1)
    return bool(np.all(time <= shortest + tol))


def derive_times(instance: Instance) -> DerivedTimes:
    """Accesso/uscita uniformi: vartheta per il tempo medio fuori diagonale."""
    if not instance.closed:
        raise ContractViolation("derive_times richiede un'istanza chiusa (metric_closure)")
    n = instance.n
    total = float(instance.time.sum())
    value = instance.params.vartheta * total / (n * (n - 1))
    uniform = tuple(value for _ in range(n))
    return DerivedTimes(access=uniform, exit=uniform)


def derive_revenues(instance: Instance, seed: int,
                    gamma_override: Optional[float] = None) -> Tuple[float, ...]:
    """R_c = (1 + gamma_c) t_od, una estrazione per commodity nell'ordine delle commodity."""
    rng = SplitMix64(seed)
    revenues = []
    for commodity in instance.commodities:
        gamma = rng.uniform() if gamma_override is None else gamma_override
        revenues.append((1.0 + gamma) * instance.direct_time(commodity))
    return tuple(revenues)


def resolve_revenues(instance: Instance) -> Instance:
    """Fissa il vettore R_c secondo la specifica dei ricavi dei parametri."""
    rule = instance.params.revenue
    if isinstance(rule, ExplicitRevenue):
        if len(rule.values) != len(instance.commodities):
            raise ValidationError(
                f"{len(rule.values)} ricavi espliciti per {len(instance.commodities)} commodity"
            )
        revenues = tuple(float(v) for v in rule.values)
    else:
        revenues = derive_revenues(instance, derive_seed(rule.seed, REVENUE_SEED_OFFSET))
    return replace(instance, revenues=revenues)


def sparsify(instance: Instance, fraction: float, seed: int,
             trim_fraction: float = SPARSIFY_TRIM_FRACTION) -> Instance:
    """
    Riduce l'insieme degli archi hub candidati.

    Ordina gli archi per tempo (pareggi lessicografici), scarta floor(trim*|E|)
    archi a ciascun estremo e tiene un sottoinsieme uniforme di
    ceil(fraction * |rimanenti|) archi. Nodi, tempi e commodity non cambiano.
    """
    if not (0.0 < fraction < 1.0):
        raise ValidationError(f"frazione di sparsificazione fuori da (0,1): {fraction}")
    if not instance.closed:
        raise ContractViolation("sparsify richiede un'istanza chiusa")

    ranked = sorted(instance.edges, key=lambda e: (float(instance.time[e[0], e[1]]), e))
    trim = math.floor(trim_fraction * len(ranked))
    middle = ranked[trim:len(ranked) - trim]
    keep = min(len(middle), math.ceil(fraction * len(middle) - EPS))
    chosen = SplitMix64(seed).sample_indices(len(middle), keep)
    edges = frozenset(middle[i] for i in chosen)
    logger.debug(f"sparsify: {len(ranked)} archi, {trim} scartati per lato, {len(edges)} mantenuti")
    return replace(instance, edges=edges)


def prepare_instance(instance: Instance, sparsify_fraction: Optional[float] = None,
                     seed: Optional[int] = None) -> Instance:
    """Chiusura metrica, ricavi e (opzionale) sparsificazione, in quest'ordine."""
    prepared = resolve_revenues(metric_closure(instance))
    if sparsify_fraction is not None:
        if seed is None:
            rule = instance.params.revenue
            seed = rule.seed if isinstance(rule, GammaRule) else 0
        prepared = sparsify(prepared, sparsify_fraction, derive_seed(seed, SPARSIFY_SEED_OFFSET))
    return prepared


def with_params(instance: Instance, **changes) -> Instance:
    """Copia dell'istanza con alcuni parametri sostituiti."""
    return replace(instance, params=replace(instance.params, **changes))


def make_instance(time: Sequence[Sequence[float]], populations: Sequence[float],
                  params: Params, edges=None, commodities=None,
                  labels: Optional[Sequence[str]] = None) -> Instance:
    """Costruttore di comodo per istanze in memoria (fixture, script)."""
    n = len(populations)
    nodes = tuple(
        Node(id=i, label=labels[i] if labels else str(i), population=float(populations[i]))
        for i in range(n)
    )
    return Instance(
        nodes=nodes,
        edges=frozenset(edges) if edges is not None else all_pairs(n),
        time=np.array(time, dtype=float),
        commodities=tuple(commodities) if commodities is not None else default_commodities(n),
        params=params,
    )
