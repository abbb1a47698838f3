"""
Aritmetica chiusa di domanda e profitto.

f(t') = R * Po * Pd * (t_direct - t') / t'^r  è non crescente e convessa
su (0, t_direct]; le derivate servono ai test di proprietà.
Le potenze sono sempre calcolate come exp(r * ln t).
"""

import math
from dataclasses import dataclass
from typing import Sequence

from config.settings import EPS
from core.errors import ContractViolation, DomainError


@dataclass(frozen=True)
class ProfitTerm:
    R: float
    Po: float
    Pd: float
    t_direct: float
    r: float

    def __post_init__(self):
        if self.R < 0:
            raise DomainError(f"R negativo: {self.R}")
        if not (self.Po > 0 and self.Pd > 0 and self.t_direct > 0 and self.r > 0):
            raise DomainError(f"termine di profitto non ammissibile: {self}")

    @property
    def weight(self) -> float:
        return self.R * self.Po * self.Pd


def _power(t: float, exponent: float) -> float:
    return math.exp(exponent * math.log(t))


def _check_time(term: ProfitTerm, t_prime: float):
    if not t_prime > 0:
        raise DomainError(f"tempo non positivo: {t_prime}")
    if t_prime > term.t_direct + EPS:
        raise DomainError(f"tempo {t_prime} oltre il tempo diretto {term.t_direct}")


def demand(Po: float, Pd: float, T: float, r: float) -> float:
    """Domanda gravitazionale Po * Pd / T^r."""
    if not T > 0:
        raise DomainError(f"tempo non positivo: {T}")
    return Po * Pd / _power(T, r)


def profit(term: ProfitTerm, t_prime: float) -> float:
    _check_time(term, t_prime)
    saved = max(term.t_direct - t_prime, 0.0)
    if saved == 0.0:
        return 0.0
    return term.weight * saved / _power(t_prime, term.r)


def profit_d1(term: ProfitTerm, t_prime: float) -> float:
    _check_time(term, t_prime)
    r = term.r
    return term.weight * ((r - 1.0) * t_prime - r * term.t_direct) / _power(t_prime, r + 1.0)


def profit_d2(term: ProfitTerm, t_prime: float) -> float:
    _check_time(term, t_prime)
    r = term.r
    return term.weight * r * ((r + 1.0) * term.t_direct - (r - 1.0) * t_prime) / _power(t_prime, r + 2.0)


def static_profit(term: ProfitTerm, t_prime: float) -> float:
    """Profitto a domanda congelata al tempo diretto (modello statico)."""
    _check_time(term, t_prime)
    saved = max(term.t_direct - t_prime, 0.0)
    return term.weight * saved / _power(term.t_direct, term.r)


def path_time(o: int, hubs: Sequence[int], d: int, times, derived, alpha: float) -> float:
    """
    Tempo di un cammino o -> h1 -> ... -> hk -> d.

    Se o == h1 (o d == hk) il tratto iniziale (finale) vale zero perché la
    diagonale dei tempi è nulla.
    """
    if len(hubs) < 2:
        raise ContractViolation("un cammino richiede almeno due hub")
    if len(set(hubs)) != len(hubs):
        raise ContractViolation(f"sequenza di hub non semplice: {list(hubs)}")
    first, last = hubs[0], hubs[-1]
    total = float(times[o][first]) + derived.access[first]
    for a, b in zip(hubs, hubs[1:]):
        total += alpha * float(times[a][b])
    total += derived.exit[last] + float(times[last][d])
    return total
