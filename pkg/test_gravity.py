#!/usr/bin/env python3
"""
Test della funzione di profitto gravitazionale.

Verifica su 1000 tuple casuali che f sia non crescente e convessa
(segno delle derivate) e che le derivate chiuse coincidano con le
differenze finite centrali.

Usage:
    python test_gravity.py
"""

import math
import sys

from core.errors import ContractViolation, DomainError
from core.gravity import ProfitTerm, demand, path_time, profit, profit_d1, profit_d2, static_profit
from core.model import DerivedTimes
from core.prng import SplitMix64
from testdata import run_tests


def _random_terms(count: int, seed: int = 2024):
    rng = SplitMix64(seed)
    for _ in range(count):
        term = ProfitTerm(
            R=rng.uniform_range(0.1, 10.0),
            Po=rng.uniform_range(1.0, 100.0),
            Pd=rng.uniform_range(1.0, 100.0),
            t_direct=rng.uniform_range(1.0, 100.0),
            r=rng.uniform_range(0.5, 2.68),
        )
        t_prime = term.t_direct * rng.uniform_range(0.05, 0.95)
        yield term, t_prime


def test_demand_and_profit_values():
    assert abs(demand(4.0, 9.0, 2.0, 1.0) - 18.0) < 1e-12
    term = ProfitTerm(R=2.0, Po=3.0, Pd=4.0, t_direct=10.0, r=2.0)
    assert abs(profit(term, 5.0) - 2.0 * 12.0 * 5.0 / 25.0) < 1e-12
    assert profit(term, 10.0) == 0.0
    # tempo di poco oltre il diretto entro EPS: profitto nullo
    assert profit(term, 10.0 + 1e-12) == 0.0
    assert abs(static_profit(term, 5.0) - 2.0 * 12.0 * 5.0 / 100.0) < 1e-12


def test_domain_errors():
    term = ProfitTerm(R=1.0, Po=1.0, Pd=1.0, t_direct=10.0, r=1.0)
    for t_prime in (0.0, -1.0, 11.0):
        try:
            profit(term, t_prime)
            assert False, f"attesa DomainError per t'={t_prime}"
        except DomainError:
            pass
    try:
        ProfitTerm(R=-1.0, Po=1.0, Pd=1.0, t_direct=1.0, r=1.0)
        assert False, "attesa DomainError per R negativo"
    except DomainError:
        pass


def test_derivative_signs():
    for term, t_prime in _random_terms(1000):
        assert profit_d1(term, t_prime) <= 1e-12
        assert profit_d2(term, t_prime) >= -1e-12


def test_derivatives_match_finite_differences():
    for term, t_prime in _random_terms(1000, seed=7):
        h = 1e-5 * t_prime
        fd1 = (profit(term, t_prime + h) - profit(term, t_prime - h)) / (2.0 * h)
        fd2 = (profit_d1(term, t_prime + h) - profit_d1(term, t_prime - h)) / (2.0 * h)
        d1 = profit_d1(term, t_prime)
        d2 = profit_d2(term, t_prime)
        assert math.isclose(fd1, d1, rel_tol=1e-6), (term, t_prime, fd1, d1)
        assert math.isclose(fd2, d2, rel_tol=1e-6), (term, t_prime, fd2, d2)


def test_profit_monotone_on_grid():
    for term, _ in _random_terms(50, seed=99):
        # estremo esatto: t_direct * 20 / 20.0 può differire da t_direct nell'ultimo bit
        grid = [term.t_direct * k / 20.0 for k in range(1, 20)] + [term.t_direct]
        values = [profit(term, t) for t in grid]
        assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))
        assert values[-1] == 0.0


def test_path_time():
    times = [[0, 4, 6, 8], [4, 0, 2, 4], [6, 2, 0, 2], [8, 4, 2, 0]]
    derived = DerivedTimes(access=(1.0,) * 4, exit=(1.0,) * 4)
    # 0 -> 1 -> 2 -> 3 con alpha 0.5: 4 + 1 + 0.5 * 2 + 1 + 2
    assert path_time(0, (1, 2), 3, times, derived, 0.5) == 9.0
    # origine e destinazione come hub: solo accesso/uscita
    assert path_time(0, (0, 1, 2, 3), 3, times, derived, 0.5) == 1.0 + 0.5 * 8 + 1.0
    for hubs in ((1,), (1, 2, 1)):
        try:
            path_time(0, hubs, 3, times, derived, 0.5)
            assert False, f"attesa ContractViolation per {hubs}"
        except ContractViolation:
            pass


def run_all_tests():
    tests = [
        ("Domanda e profitto", test_demand_and_profit_values),
        ("Errori di dominio", test_domain_errors),
        ("Segno delle derivate (1000 tuple)", test_derivative_signs),
        ("Derivate vs differenze finite", test_derivatives_match_finite_differences),
        ("Profitto non crescente", test_profit_monotone_on_grid),
        ("Tempo di cammino", test_path_time),
    ]
    return run_tests("GRAVITÀ E PROFITTO - TEST SUITE", tests)


if __name__ == "__main__":
    sys.exit(run_all_tests())
