#!/usr/bin/env python3
"""
Test del modello d'istanza: generatore SplitMix64, chiusura metrica,
tempi derivati, ricavi, sparsificazione e caricamento dei file.

Usage:
    python test_model.py
"""

import sys
import tempfile
from pathlib import Path

import numpy as np

from core.errors import ContractViolation, ParseError, ValidationError
from core.instance_io import load_instance, write_bundle
from core.model import (
    DemandModel, ExplicitRevenue, GammaRule, Params, check_triangle_inequality, derive_revenues,
    derive_times, make_instance, metric_closure, prepare_instance, resolve_revenues, sparsify,
    with_params,
)
from core.prng import SplitMix64, derive_seed
from testdata import random_instance, run_tests, write_montreal_bundle


def _params(p=2, **changes):
    values = dict(p=p, alpha=0.5, r=1.7, vartheta=0.1, revenue=GammaRule(1))
    values.update(changes)
    return Params(**values)


def test_splitmix_reference_values():
    assert SplitMix64(0).next_u64() == 0xE220A8397B1DCDAF
    rng = SplitMix64(1234567)
    assert rng.next_u64() == 6457827717110365317
    assert rng.next_u64() == 3203168211198807973


def test_splitmix_uniform_and_sampling():
    rng = SplitMix64(42)
    values = [rng.uniform() for _ in range(1000)]
    assert all(0.0 <= v < 1.0 for v in values)
    first = SplitMix64(9).sample_indices(20, 7)
    assert first == SplitMix64(9).sample_indices(20, 7)
    assert len(set(first)) == 7 and first == sorted(first)
    assert all(0 <= i < 20 for i in first)
    assert derive_seed(2 ** 64 - 1, 1) == 0


def test_metric_closure_shortens_detour():
    time = [[0, 1, 5], [1, 0, 1], [5, 1, 0]]
    instance = make_instance(time, [1, 1, 1], _params())
    assert not check_triangle_inequality(instance.time)
    closed = metric_closure(instance)
    assert closed.closed
    assert closed.time[0, 2] == 2.0
    assert closed.time[2, 0] == 2.0
    assert check_triangle_inequality(closed.time)
    # l'istanza originale non cambia
    assert instance.time[0, 2] == 5.0


def test_metric_closure_disconnected():
    inf = float('inf')
    time = [[0, 1, inf, inf], [1, 0, inf, inf], [inf, inf, 0, 1], [inf, inf, 1, 0]]
    instance = make_instance(time, [1, 1, 1, 1], _params())
    try:
        metric_closure(instance)
        assert False, "attesa ValidationError"
    except ValidationError:
        pass


def test_derive_times_uniform():
    time = [[0, 2, 4], [2, 0, 3], [4, 3, 0]]
    instance = metric_closure(make_instance(time, [1, 2, 3], _params(vartheta=0.1)))
    derived = derive_times(instance)
    expected = 0.1 * 18.0 / 6.0
    assert all(abs(v - expected) < 1e-12 for v in derived.access)
    assert derived.access == derived.exit
    try:
        derive_times(make_instance(time, [1, 2, 3], _params()))
        assert False, "attesa ContractViolation su istanza non chiusa"
    except ContractViolation:
        pass


def test_revenues_gamma_and_explicit():
    instance = metric_closure(make_instance([[0, 2, 4], [2, 0, 3], [4, 3, 0]], [1, 2, 3], _params()))
    revenues = derive_revenues(instance, 11)
    assert revenues == derive_revenues(instance, 11)
    for commodity, value in zip(instance.commodities, revenues):
        t_od = instance.direct_time(commodity)
        assert t_od <= value < 2.0 * t_od
    fixed = derive_revenues(instance, 11, gamma_override=0.5)
    assert all(abs(v - 1.5 * instance.direct_time(c)) < 1e-12 for c, v in zip(instance.commodities, fixed))

    resolved = resolve_revenues(instance)
    assert resolved.revenues == derive_revenues(instance, derive_seed(1, 1))

    explicit = with_params(instance, revenue=ExplicitRevenue((1.0, 2.0, 3.0)))
    assert resolve_revenues(explicit).revenues == (1.0, 2.0, 3.0)
    wrong = with_params(instance, revenue=ExplicitRevenue((1.0,)))
    try:
        resolve_revenues(wrong)
        assert False, "attesa ValidationError"
    except ValidationError:
        pass


def test_sparsify_counts_and_determinism():
    instance = random_instance(6, 3, 0.5, seed=3)
    assert len(instance.edges) == 15
    sparse = sparsify(instance, 0.5, seed=5)
    # 15 archi, 1 scartato per lato, ceil(0.5 * 13) = 7
    assert len(sparse.edges) == 7
    assert sparse.edges == sparsify(instance, 0.5, seed=5).edges
    assert sparse.edges <= instance.edges
    ranked = sorted(instance.edges, key=lambda e: (float(instance.time[e]), e))
    assert ranked[0] not in sparse.edges and ranked[-1] not in sparse.edges
    assert np.array_equal(sparse.time, instance.time)
    # intervallo aperto: 0 e 1 sono rifiutati
    for fraction in (0.0, 1.0, 1.5, -0.2):
        try:
            sparsify(instance, fraction, seed=5)
            assert False, f"attesa ValidationError per {fraction}"
        except ValidationError:
            pass


def test_params_and_instance_validation():
    for bad in (dict(p=1), dict(alpha=0.0), dict(alpha=1.5), dict(r=0.0), dict(vartheta=-0.1)):
        try:
            _params(**bad)
            assert False, f"attesa ValidationError per {bad}"
        except ValidationError:
            pass
    cases = [
        ([[0, 1], [2, 0]], [1, 1], _params()),              # asimmetrica
        ([[0, 1], [1, 0]], [1, 0], _params()),              # popolazione nulla
        ([[0, 1], [1, 0]], [1, 1], _params(p=3)),           # p > n
        ([[1, 1], [1, 0]], [1, 1], _params()),              # diagonale
    ]
    for time, populations, params in cases:
        try:
            make_instance(time, populations, params)
            assert False, f"attesa ValidationError per {time}, {populations}"
        except ValidationError:
            pass


def test_prepare_instance_static_mode():
    instance = random_instance(5, 2, 0.5, seed=4)
    static = with_params(instance, demand_model=DemandModel.STATIC)
    assert static.params.demand_model is DemandModel.STATIC
    assert static.revenues == instance.revenues
    assert prepare_instance(make_instance(instance.time, [1] * 5, instance.params), 0.5, seed=4).edges


def test_bundle_roundtrip():
    with tempfile.TemporaryDirectory() as tmp:
        bundle = write_montreal_bundle(Path(tmp) / "mtl")
        instance = load_instance(bundle, "csv-bundle")
        assert instance.n == 8
        assert instance.params.p == 3
        assert instance.nodes[0].lon == -73.5673 and instance.nodes[0].lat == 45.5017
        assert len(instance.commodities) == 28

        prepared = prepare_instance(instance)
        copy = write_bundle(prepared, Path(tmp) / "copy", explicit_revenues=True)
        again = resolve_revenues(load_instance(copy, "csv-bundle"))
        assert again.revenues == prepared.revenues
        assert np.allclose(again.time, prepared.time)

        overridden = load_instance(bundle, "csv-bundle", overrides={'p': 2, 'alpha': 0.8}, ordered_pairs=True)
        assert overridden.params.p == 2 and overridden.params.alpha == 0.8
        assert len(overridden.commodities) == 56


def test_bundle_errors():
    with tempfile.TemporaryDirectory() as tmp:
        empty = Path(tmp) / "empty"
        empty.mkdir()
        try:
            load_instance(empty, "csv-bundle")
            assert False, "attesa ParseError"
        except ParseError:
            pass
        bundle = write_montreal_bundle(Path(tmp) / "bad")
        with open(bundle / "edges.csv", 'a', encoding='utf-8') as f:
            f.write("0,1,abc\n")
        try:
            load_instance(bundle, "csv-bundle")
            assert False, "attesa ParseError"
        except ParseError as e:
            assert e.line is not None


def test_cab_loader():
    size = 25
    flows = np.ones((size, size))
    costs = np.array([[abs(i - j) * 100.0 for j in range(size)] for i in range(size)])
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "cab.txt"
        with open(path, 'w', encoding='utf-8') as f:
            f.write(f"{size}\n")
            for row in flows:
                f.write(" ".join(str(v) for v in row) + "\n")
            for row in costs:
                f.write(" ".join(str(v) for v in row) + "\n")
        instance = load_instance(path, "cab", subset=10, overrides={'p': 3})
        assert instance.n == 10
        assert abs(instance.population(0) - np.sqrt(10.0)) < 1e-12
        assert instance.time[0, 9] == 900.0
        assert len(instance.edges) == 45

        with open(path, 'a', encoding='utf-8') as f:
            f.write("x\n")
        try:
            load_instance(path, "cab")
            assert False, "attesa ParseError"
        except ParseError:
            pass


def run_all_tests():
    tests = [
        ("SplitMix64 valori di riferimento", test_splitmix_reference_values),
        ("SplitMix64 uniformi e campionamento", test_splitmix_uniform_and_sampling),
        ("Chiusura metrica", test_metric_closure_shortens_detour),
        ("Chiusura metrica su rete non connessa", test_metric_closure_disconnected),
        ("Tempi derivati", test_derive_times_uniform),
        ("Ricavi gamma ed espliciti", test_revenues_gamma_and_explicit),
        ("Sparsificazione", test_sparsify_counts_and_determinism),
        ("Validazione parametri e istanza", test_params_and_instance_validation),
        ("Modalità statica", test_prepare_instance_static_mode),
        ("csv-bundle andata e ritorno", test_bundle_roundtrip),
        ("csv-bundle malformati", test_bundle_errors),
        ("Loader CAB", test_cab_loader),
    ]
    return run_tests("MODELLO D'ISTANZA - TEST SUITE", tests)


if __name__ == "__main__":
    sys.exit(run_all_tests())
