#!/usr/bin/env python3
"""
Test delle formulazioni MILP: conteggi, sostituzione delle linee in tutte
le varianti, separazione SEC, verifica delle soluzioni e I/O MPS/LP.

Usage:
    python test_milp.py
"""

import math
import sys
import tempfile
from pathlib import Path

from core.errors import InfeasibleAssignmentError, InvalidCombinationError, ParseError
from core.milp import (
    SecCut, Variant, add_cuts, build_milp, check_assignment, expected_row_count,
    l_name, line_to_assignment, objective_value, separate_sec, verify_solution, y_name, z_name,
)
from core.milp_io import export_model, read_mps, read_solution, same_structure, write_solution
from core.paths import enumerate_all
from core.solver import HubLine, iter_canonical_lines, solve_enumerate
from testdata import random_instance, run_tests

CUT_OPTIONS = {
    Variant.F1L_FLOW: [(), ("desthub_orhub",)],
    Variant.F1L_SEC: [(), ("desthub_orhub",)],
    Variant.F2L: [(), ("desthub_orhub",)],
    Variant.F2L_PRIME: [(), ("desthub_orhub",), ("ineq_new",), ("desthub_orhub", "ineq_new")],
}


def _fixture(n=6, p=3, alpha=0.4, seed=61):
    instance = random_instance(n, p, alpha, seed=seed)
    candidates, _ = enumerate_all(instance, workers=1)
    return instance, candidates


def test_row_and_variable_counts():
    instance, candidates = _fixture()
    n = instance.n
    e = len(instance.edges)
    c = len(instance.commodities)
    total = sum(len(paths) for paths in candidates.values())
    model = build_milp(instance, candidates, "f1l_flow")
    assert model.row_count == 1 + 1 + n + n + n * (n - 1) // 2 + e + c + e * c
    assert model.variable_count == n + e + n * (n - 1) + total
    with_cuts = build_milp(instance, candidates, "f1l_flow", ["desthub_orhub"])
    assert with_cuts.row_count == model.row_count + 2 * c
    for variant, options in CUT_OPTIONS.items():
        for cuts in options:
            built = build_milp(instance, candidates, variant, cuts)
            assert built.row_count == expected_row_count(instance, variant, cuts), (variant, cuts)


def test_objective_coefficients():
    instance, candidates = _fixture()
    model = build_milp(instance, candidates, "f2l")
    assert len(model.candidate_of) == sum(len(paths) for paths in candidates.values())
    for name, path in model.candidate_of.items():
        assert math.isclose(model.objective[name], path.profit, rel_tol=1e-12)
    empty = build_milp(instance, {}, "f1l_sec")
    assert not empty.objective
    assert empty.row_count == expected_row_count(instance, "f1l_sec")


def test_invalid_combination():
    instance, candidates = _fixture()
    for variant in ("f2l", "f1l_flow"):
        try:
            build_milp(instance, candidates, variant, ["ineq_new"])
            assert False, f"attesa InvalidCombinationError per {variant}"
        except InvalidCombinationError:
            pass


def test_mtz_coefficients():
    instance, candidates = _fixture(n=4, p=3, seed=5)
    model = build_milp(instance, candidates, "f2l")
    row = model.rows["mtz_0_1"]
    coeffs = dict(row.coeffs)
    assert coeffs["yp_0_1"] == 4.0
    assert coeffs["l_0"] == 1.0 and coeffs["l_1"] == -1.0
    assert row.rhs == 3.0
    assert model.variables["l_2"].ub == 3.0


def _served_profit(instance, candidates, line) -> float:
    """Profitto della linea scelto a mano: miglior candidato contenuto per commodity."""
    edges = line.edges
    return sum(
        max((path.profit for path in candidates.get(commodity, ()) if path.hub_edges <= edges), default=0.0)
        for commodity in instance.commodities
    )


def test_line_substitution_all_variants():
    instance, candidates = _fixture()
    for variant, options in CUT_OPTIONS.items():
        for cuts in options:
            model = build_milp(instance, candidates, variant, cuts)
            for nodes in iter_canonical_lines(instance):
                line = HubLine(nodes)
                values = line_to_assignment(instance, candidates, model, line)
                violations = check_assignment(model, values)
                assert not violations, (variant, cuts, nodes, [str(v) for v in violations[:3]])
                expected = _served_profit(instance, candidates, line)
                assert math.isclose(objective_value(model, values), expected, rel_tol=1e-9, abs_tol=1e-9)


def test_substituted_optimum_matches_enumeration():
    instance, candidates = _fixture()
    optimum = solve_enumerate(instance, candidates)
    best_line = max(
        (HubLine(nodes) for nodes in iter_canonical_lines(instance)),
        key=lambda line: _served_profit(instance, candidates, line),
    )
    assert math.isclose(_served_profit(instance, candidates, best_line), optimum.objective,
                        rel_tol=1e-9, abs_tol=1e-12)
    for variant in Variant:
        model = build_milp(instance, candidates, variant)
        values = line_to_assignment(instance, candidates, model, optimum.line)
        chosen = {path.commodity for name, path in model.candidate_of.items()
                  if values[name] == 1.0}
        served = {commodity for commodity in instance.commodities
                  if any(path.hub_edges <= optimum.line.edges for path in candidates.get(commodity, ()))}
        assert chosen == served
        assert math.isclose(objective_value(model, values), optimum.objective, rel_tol=1e-9, abs_tol=1e-12)


def test_all_zero_assignment_violates_hubs():
    instance, candidates = _fixture()
    model = build_milp(instance, candidates, "f1l_sec")
    rows = {v.row for v in check_assignment(model, {})}
    assert "hubs" in rows and "edges" in rows


def test_separate_sec_examples():
    instance, _ = _fixture(n=6, p=4)
    z = {k: 1.0 for k in (1, 2, 3)}
    cycle = {(1, 2): 1.0, (2, 3): 1.0, (1, 3): 1.0}
    cuts = separate_sec(instance, z, cycle)
    assert cuts == [SecCut(S=(1, 2, 3), s=1)]
    lhs = sum(cycle.values())
    rhs = sum(z[i] for i in cuts[0].S if i != cuts[0].s)
    assert lhs - rhs >= 1.0

    path = {(0, 1): 1.0, (1, 2): 1.0, (2, 3): 1.0}
    assert separate_sec(instance, {k: 1.0 for k in range(4)}, path) == []

    # due componenti: segmento 4-5 e triangolo 0-1-2
    z = {k: 1.0 for k in (0, 1, 2, 4, 5)}
    mixed = {(0, 1): 1.0, (1, 2): 1.0, (0, 2): 1.0, (4, 5): 1.0}
    assert separate_sec(instance, z, mixed) == [SecCut(S=(0, 1, 2), s=0)]


def test_verify_optimal_solution():
    instance, candidates = _fixture()
    optimum = solve_enumerate(instance, candidates)
    for variant in Variant:
        model = build_milp(instance, candidates, variant)
        values = line_to_assignment(instance, candidates, model, optimum.line)
        verification = verify_solution(instance, candidates, model, values)
        assert verification.feasible, [str(v) for v in verification.violations]
        assert verification.solution.line == optimum.line
        assert math.isclose(verification.objective, optimum.objective, rel_tol=1e-9, abs_tol=1e-12)
        verification.raise_for_violations()


def test_verify_subtour_and_cut_loop():
    instance, candidates = _fixture(n=6, p=4)
    model = build_milp(instance, candidates, "f1l_sec")
    values = {name: 0.0 for name in model.variables}
    for k in (0, 1, 2, 3):
        values[z_name(k)] = 1.0
    for a, b in ((0, 1), (1, 2), (0, 2)):
        values[y_name(a, b)] = 1.0
    verification = verify_solution(instance, candidates, model, values)
    assert verification.has_subtour
    assert not verification.feasible
    assert verification.solution is None
    assert verification.cuts == [SecCut(S=(0, 1, 2), s=0)]

    cut_model = add_cuts(model, instance, verification.cuts)
    assert cut_model.row_count == model.row_count + 1
    assert "sec_0" in cut_model.rows
    assert check_assignment(cut_model, values)
    again = add_cuts(cut_model, instance, verification.cuts)
    assert again.row_count == cut_model.row_count

    try:
        add_cuts(build_milp(instance, candidates, "f2l"), instance, verification.cuts)
        assert False, "attesa InvalidCombinationError"
    except InvalidCombinationError:
        pass


def test_infeasible_assignment_report():
    instance, candidates = _fixture()
    model = build_milp(instance, candidates, "f1l_flow")
    line = HubLine(next(iter_canonical_lines(instance)))
    values = line_to_assignment(instance, candidates, model, line)
    values[z_name(5)] = 1.0
    verification = verify_solution(instance, candidates, model, values)
    assert any(v.row == "hubs" for v in verification.violations)
    try:
        verification.raise_for_violations()
        assert False, "attesa InfeasibleAssignmentError"
    except InfeasibleAssignmentError as e:
        assert e.violations


def test_mps_roundtrip_and_determinism():
    instance, candidates = _fixture()
    model = build_milp(instance, candidates, "f1l_sec", ["desthub_orhub"])
    model = add_cuts(model, instance, [SecCut(S=(0, 1, 2), s=0)])
    with tempfile.TemporaryDirectory() as tmp:
        first = export_model(model, "mps", Path(tmp) / "a.mps")
        second = export_model(model, "mps", Path(tmp) / "b.mps")
        assert first.read_bytes() == second.read_bytes()
        parsed = read_mps(first)
        assert same_structure(model, parsed)
        assert parsed.sec_cuts == (SecCut(S=(0, 1, 2), s=0),)
        again = export_model(parsed, "mps", Path(tmp) / "c.mps")
        assert same_structure(model, read_mps(again))

        flow = build_milp(instance, candidates, "f1l_flow")
        path = export_model(flow, "mps", Path(tmp) / "flow.mps")
        text = path.read_text(encoding='utf-8')
        assert text.startswith("* hubline ")
        assert "*SENSE:Maximize" in text and "e+20" in text and "'INTORG'" in text
        restored = read_mps(path)
        assert same_structure(flow, restored)
        flows = [var for name, var in restored.variables.items() if name.startswith("f_")]
        assert flows and all(var.ub == 1e20 for var in flows)


def test_lp_writer():
    instance, candidates = _fixture()
    model = build_milp(instance, candidates, "f2l_prime", ["ineq_new"])
    with tempfile.TemporaryDirectory() as tmp:
        path = export_model(model, "lp", Path(tmp) / "model.lp")
        text = path.read_text(encoding='utf-8')
        copy = export_model(model, "lp", Path(tmp) / "copy.lp").read_text(encoding='utf-8')
    assert text.startswith("\\* hubline ")
    for section in ("Maximize", "Subject To", "Bounds", "Binaries", "End"):
        assert f"\n{section}\n" in text or text.endswith(f"{section}\n")
    assert "outhub_0_1:" in text
    assert text == copy
    # l_k continue con limite superiore n - 1
    assert model.variables[l_name(0)].ub == float(instance.n - 1)


def test_solution_reader():
    instance, candidates = _fixture()
    model = build_milp(instance, candidates, "f1l_sec")
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "sol.txt"
        path.write_text("# soluzione\nz_0 1\nz_1=1  # commento\n\ny_0_1 = 1.0\n", encoding='utf-8')
        values = read_solution(path, model)
        assert values == {"z_0": 1.0, "z_1": 1.0, "y_0_1": 1.0}

        written = write_solution(values, Path(tmp) / "copy.txt")
        assert read_solution(written, model) == values

        path.write_text("w_9 1\n", encoding='utf-8')
        try:
            read_solution(path, model)
            assert False, "attesa ParseError"
        except ParseError as e:
            assert e.line == 1


def test_export_unwritable_path():
    instance, candidates = _fixture()
    model = build_milp(instance, candidates, "f1l_sec")
    with tempfile.TemporaryDirectory() as tmp:
        blocker = Path(tmp) / "file"
        blocker.write_text("x", encoding='utf-8')
        try:
            export_model(model, "mps", blocker / "model.mps")
            assert False, "atteso OSError"
        except OSError:
            pass


def run_all_tests():
    tests = [
        ("Conteggi righe e variabili", test_row_and_variable_counts),
        ("Coefficienti dell'obiettivo", test_objective_coefficients),
        ("Combinazioni non ammesse", test_invalid_combination),
        ("Coefficienti MTZ", test_mtz_coefficients),
        ("Sostituzione delle linee in tutte le varianti", test_line_substitution_all_variants),
        ("Ottimo sostituito contro enumerazione", test_substituted_optimum_matches_enumeration),
        ("Assegnamento nullo", test_all_zero_assignment_violates_hubs),
        ("Separazione SEC", test_separate_sec_examples),
        ("Verifica della soluzione ottima", test_verify_optimal_solution),
        ("Subtour e ciclo di tagli", test_verify_subtour_and_cut_loop),
        ("Report delle violazioni", test_infeasible_assignment_report),
        ("MPS andata e ritorno", test_mps_roundtrip_and_determinism),
        ("Writer LP", test_lp_writer),
        ("Lettura soluzioni", test_solution_reader),
        ("Export su percorso non scrivibile", test_export_unwritable_path),
    ]
    return run_tests("FORMULAZIONI MILP - TEST SUITE", tests)


if __name__ == "__main__":
    sys.exit(run_all_tests())
