#!/usr/bin/env python3
"""
Test end-to-end della riga di comando sul csv-bundle sintetico
in formato Montreal.

Usage:
    python test_cli.py
"""

import csv
import json
import math
import sys
import tempfile
from pathlib import Path

from config.run_config import RunConfig
from config.settings import (
    CANDIDATES_FILE, EXIT_CAPPED, EXIT_FAILURE, EXIT_OK, EXIT_VALIDATION, GEOJSON_FILE, RUN_REPORT_FILE,
    SEC_CUTS_FILE, SOLUTION_FILE,
)
from core.instance_io import load_instance
from core.milp import build_milp, line_to_assignment, y_name, z_name
from core.milp_io import read_mps, write_solution
from core.model import prepare_instance
from core.paths import enumerate_all
from core.reports import file_checksum, read_solution_line
from core.solver import HubLine
from testdata import MONTREAL_NODES, run_tests, write_montreal_bundle
from ui.cli import main


def _report(out: Path) -> dict:
    with open(out / RUN_REPORT_FILE, 'r', encoding='utf-8') as f:
        return json.load(f)


def _common(bundle: Path, out: Path, *extra):
    return ["--instance", str(bundle), "--format", "csv-bundle", "--out", str(out), *extra]


def test_paths_command_and_workers():
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        bundle = write_montreal_bundle(tmp / "mtl")
        assert main(["paths", *_common(bundle, tmp / "w1", "--workers", "1")]) == EXIT_OK
        assert main(["paths", *_common(bundle, tmp / "w2", "--workers", "2")]) == EXIT_OK
        first = file_checksum(tmp / "w1" / CANDIDATES_FILE)
        assert first == file_checksum(tmp / "w2" / CANDIDATES_FILE)
        report = _report(tmp / "w1")
        assert report['command'] == "paths"
        assert report['timings']['t_path'] >= 0
        assert report['result']['checksum'] == first
        assert report['parameters']['effective']['p'] == 3
        assert report['parameters']['effective']['revenue']['seed'] == 7
        assert set(report['result']['paths']['per_type']) == {"ODH", "DH", "OH", "ODNH"}

        with open(tmp / "w1" / CANDIDATES_FILE, 'r', encoding='utf-8', newline='') as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["commodity_o", "commodity_d", "ptype", "tau", "profit", "hubs"]
        assert len(rows) - 1 == report['result']['paths']['n_path']
        for row in rows[1:]:
            hubs = [int(v) for v in row[5].split(";")]
            assert len(hubs) >= 2 and row[2] in ("ODH", "DH", "OH", "ODNH")


def test_prep_command():
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        bundle = write_montreal_bundle(tmp / "mtl")
        assert main(["prep", *_common(bundle, tmp / "out", "--workers", "1")]) == EXIT_OK
        report = _report(tmp / "out")
        assert report['timings']['t_prep'] >= 0
        assert report['result']['triangle_inequality'] is True
        lines = (tmp / "out" / "bounds.csv").read_text(encoding='utf-8').splitlines()
        assert len(lines) == 1 + 28


def test_solve_methods_agree_and_deterministic():
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        bundle = write_montreal_bundle(tmp / "mtl")
        objectives = {}
        for method in ("enum", "bnb"):
            out = tmp / method
            assert main(["solve", *_common(bundle, out, "--method", method, "--workers", "1")]) == EXIT_OK
            objectives[method] = _report(out)['result']['solution']['objective']
        assert math.isclose(objectives['enum'], objectives['bnb'], rel_tol=1e-9)
        with open(tmp / "enum" / SOLUTION_FILE, 'r', encoding='utf-8', newline='') as f:
            header = next(csv.reader(f))
        assert header == ["o", "d", "served", "t_direct", "t_prime", "demand", "profit", "hubs"]

        assert main(["solve", *_common(bundle, tmp / "again", "--method", "enum", "--seed", "7")]) == EXIT_OK
        assert file_checksum(tmp / "enum" / SOLUTION_FILE) == file_checksum(tmp / "again" / SOLUTION_FILE)

        assert main(["solve", *_common(bundle, tmp / "p2", "--p", "2")]) == EXIT_OK
        assert len(read_solution_line(tmp / "p2" / SOLUTION_FILE)) == 2


def test_replay_reproduces_output():
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        bundle = write_montreal_bundle(tmp / "mtl")
        out = tmp / "out"
        assert main(["solve", *_common(bundle, out, "--alpha", "0.4", "--sparsify", "0.8")]) == EXIT_OK
        first = _report(out)['result']['checksum']
        copy = tmp / "report.json"
        copy.write_text((out / RUN_REPORT_FILE).read_text(encoding='utf-8'), encoding='utf-8')
        assert main(["solve", "--replay", str(copy)]) == EXIT_OK
        again = _report(out)
        assert again['result']['checksum'] == first
        assert again['parameters']['alpha'] == 0.4 and again['parameters']['sparsify'] == 0.8


def test_error_exit_codes():
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        empty = tmp / "empty"
        empty.mkdir()
        assert main(["paths", *_common(empty, tmp / "o1")]) == EXIT_VALIDATION

        bundle = write_montreal_bundle(tmp / "mtl")
        code = main(["export-milp", *_common(bundle, tmp / "o2", "--variant", "f2l", "--cuts", "ineq_new")])
        assert code == EXIT_VALIDATION

        config = RunConfig(command="solve", instance=str(bundle), method="enum", line_cap=1, out=str(tmp / "o3"))
        replay = config.save(tmp / "capped.json")
        assert main(["solve", "--replay", str(replay)]) == EXIT_CAPPED
        assert _report(tmp / "o3")['exit_status'] == EXIT_CAPPED


def test_capped_bounds_exit_code():
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        bundle = write_montreal_bundle(tmp / "mtl")
        # k_cap=0: ogni grafo ausiliario non vuoto esaurisce subito il limite
        prep = RunConfig(command="prep", instance=str(bundle), workers=1, k_cap=0, out=str(tmp / "prep"))
        assert main(["prep", "--replay", str(prep.save(tmp / "prep.json"))]) == EXIT_CAPPED
        report = _report(tmp / "prep")
        assert report['exit_status'] == EXIT_CAPPED
        assert report['result']['capped'] > 0
        assert len(report['result']['capped_commodities']) == report['result']['capped']
        assert (tmp / "prep" / "bounds.csv").exists()

        solve = RunConfig(command="solve", instance=str(bundle), method="bnb", workers=1, k_cap=0,
                          out=str(tmp / "solve"))
        assert main(["solve", "--replay", str(solve.save(tmp / "solve.json"))]) == EXIT_CAPPED
        assert _report(tmp / "solve")['exit_status'] == EXIT_CAPPED
        assert (tmp / "solve" / SOLUTION_FILE).exists()


def test_unexpected_error_exit_code():
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        bundle = write_montreal_bundle(tmp / "mtl")
        # configurazione di replay malformata: line_cap non numerico
        config = RunConfig(command="solve", instance=str(bundle), method="enum", workers=1,
                           line_cap="molte", out=str(tmp / "out"))
        assert main(["solve", "--replay", str(config.save(tmp / "bad.json"))]) == EXIT_FAILURE
        report = _report(tmp / "out")
        assert report['exit_status'] == EXIT_FAILURE
        assert report['result']['error'].startswith("TypeError")


def test_export_milp_roundtrip():
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        bundle = write_montreal_bundle(tmp / "mtl")
        out = tmp / "out"
        assert main(["export-milp", *_common(bundle, out, "--variant", "f1l_flow", "--cuts", "desthub_orhub")]) == EXIT_OK
        path = out / "hubline_f1l_flow.mps"
        parsed = read_mps(path)
        report = _report(out)
        assert parsed.row_count == report['result']['model']['rows']
        assert parsed.variable_count == report['result']['model']['variables']
        assert main(["export-milp", *_common(bundle, tmp / "lp", "--variant", "f2l", "--milp-format", "lp")]) == EXIT_OK
        assert (tmp / "lp" / "hubline_f2l.lp").read_text(encoding='utf-8').rstrip().endswith("End")


def _prepared(bundle: Path, p: int):
    instance = prepare_instance(load_instance(bundle, "csv-bundle", overrides={'p': p}))
    candidates, _ = enumerate_all(instance, workers=1)
    return instance, candidates


def test_cut_loop_subtour_then_convergence():
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        bundle = write_montreal_bundle(tmp / "mtl", p=4)
        out = tmp / "out"
        instance, candidates = _prepared(bundle, 4)
        model = build_milp(instance, candidates, "f1l_sec")

        subtour = {name: 0.0 for name in model.variables}
        for k in (0, 1, 2, 3):
            subtour[z_name(k)] = 1.0
        for a, b in ((0, 1), (1, 2), (0, 2)):
            subtour[y_name(a, b)] = 1.0
        sol = write_solution(subtour, tmp / "subtour.sol")
        assert main(["cut-loop", *_common(bundle, out, "--solution", str(sol))]) == EXIT_OK
        report = _report(out)
        assert report['result']['cut_loop']['converged'] is False
        registry = json.loads((out / SEC_CUTS_FILE).read_text(encoding='utf-8'))
        assert registry['cuts'] == [{'S': [0, 1, 2], 's': 0}]
        assert any(name.startswith("sec_") for name in read_mps(out / "hubline_f1l_sec.mps").rows)

        valid = line_to_assignment(instance, candidates, model, HubLine((0, 1, 2, 3)))
        sol = write_solution(valid, tmp / "valid.sol")
        assert main(["cut-loop", *_common(bundle, out, "--solution", str(sol))]) == EXIT_OK
        report = _report(out)
        assert report['result']['cut_loop'] == {'converged': True, 'total_cuts': 1}
        assert read_solution_line(out / SOLUTION_FILE) == [0, 1, 2, 3]


def test_geojson_export():
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        bundle = write_montreal_bundle(tmp / "mtl", p=2)
        assert main(["solve", *_common(bundle, tmp / "solve", "--method", "enum")]) == EXIT_OK
        solution_csv = tmp / "solve" / SOLUTION_FILE
        assert main(["geojson", *_common(bundle, tmp / "geo", "--solution", str(solution_csv))]) == EXIT_OK
        collection = json.loads((tmp / "geo" / GEOJSON_FILE).read_text(encoding='utf-8'))
        assert collection['type'] == "FeatureCollection"
        lines = [f for f in collection['features'] if f['geometry']['type'] == "LineString"]
        assert len(lines) == 1 and lines[0]['properties']['role'] == "hub_line"
        assert len(lines[0]['geometry']['coordinates']) == 2
        points = [f for f in collection['features'] if f['geometry']['type'] == "Point"]
        assert len(points) == len(MONTREAL_NODES)
        for feature, (label, population, lon, lat) in zip(points, MONTREAL_NODES):
            assert feature['properties']['label'] == label
            assert feature['geometry']['coordinates'] == [lon, lat]

        assert main(["geojson", *_common(bundle, tmp / "points")]) == EXIT_OK
        only_points = json.loads((tmp / "points" / GEOJSON_FILE).read_text(encoding='utf-8'))
        assert all(f['geometry']['type'] == "Point" for f in only_points['features'])

        bare = write_montreal_bundle(tmp / "bare", with_coordinates=False)
        assert main(["geojson", *_common(bare, tmp / "bad")]) == EXIT_VALIDATION


def run_all_tests():
    tests = [
        ("paths e numero di worker", test_paths_command_and_workers),
        ("prep", test_prep_command),
        ("solve enum/bnb e determinismo", test_solve_methods_agree_and_deterministic),
        ("replay dal report", test_replay_reproduces_output),
        ("Codici di uscita", test_error_exit_codes),
        ("Bound troncati: codice 3", test_capped_bounds_exit_code),
        ("Errore imprevisto: codice generico", test_unexpected_error_exit_code),
        ("export-milp", test_export_milp_roundtrip),
        ("cut-loop", test_cut_loop_subtour_then_convergence),
        ("geojson", test_geojson_export),
    ]
    return run_tests("RIGA DI COMANDO - TEST SUITE", tests)


if __name__ == "__main__":
    sys.exit(run_all_tests())
