"""
Interfaccia a riga di comando di HubLine.

Comandi: prep, paths, solve, export-milp, cut-loop, geojson.
Ogni comando scrive <out>/run_report.json con la configurazione effettiva
e restituisce un codice di uscita (0 ok, 1 errore imprevisto, 2 validazione,
3 limiti o bound troncati, 4 I/O).
"""

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from config.run_config import RunConfig
from config.settings import (
    BOUNDS_FILE, CANDIDATES_FILE, DEFAULT_SEED, EXIT_CAPPED, EXIT_FAILURE, EXIT_IO, EXIT_OK, EXIT_VALIDATION,
    GEOJSON_FILE, RUN_REPORT_FILE, SEC_CUTS_FILE, SOLUTION_FILE,
)
from core.errors import (
    CappedEnumerationError, ContractViolation, GuardRefusalError, HubLineError,
    InfeasibleAssignmentError, NodeLimitError, ValidationError,
)
from core.instance_io import FORMATS, load_instance, parse_bool
from core.logger import logger
from core.milp import (
    SecCut, Variant, add_cuts, build_milp, parse_cuts, verify_solution,
)
from core.milp_io import FORMATS as MILP_FORMATS, export_model, import_solution
from core.model import GammaRule, Instance, check_triangle_inequality, derive_times, prepare_instance
from core.paths import compute_all_bounds, enumerate_all
from core.reports import (
    RunReport, file_checksum, read_solution_line, solution_summary, write_bounds,
    write_candidates, write_geojson, write_solution_csv,
)
from core.solver import HubLine, evaluate_line, solve_bnb, solve_enumerate
from core.utils import check_dependencies, format_time


def _bool_arg(value: str) -> bool:
    try:
        return parse_bool(value)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--instance", help="file CAB o directory csv-bundle")
    common.add_argument("--format", choices=FORMATS, default="csv-bundle")
    common.add_argument("--n", type=int, help="per CAB: numero di nodi iniziali")
    common.add_argument("--p", type=int)
    common.add_argument("--alpha", type=float)
    common.add_argument("--r", type=float)
    common.add_argument("--vartheta", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--strict-filter", type=_bool_arg, dest="strict_filter")
    common.add_argument("--demand-model", choices=("elastic", "static"), dest="demand_model")
    common.add_argument("--ordered-pairs", action="store_const", const=True, dest="ordered_pairs")
    common.add_argument("--sparsify", type=float, metavar="FRACTION")
    common.add_argument("--out", default="out")
    common.add_argument("--replay", metavar="REPORT", help="riesegue con la configurazione di un run_report.json")
    common.add_argument("--log-file", dest="log_file")
    common.add_argument("--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="hubline", description="Localizzazione esatta di una linea di hub")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("prep", parents=[common], help="chiusura metrica, tempi derivati e bound")

    paths = sub.add_parser("paths", parents=[common], help="generazione dei cammini candidati")
    paths.add_argument("--dump-aux", dest="dump_aux", metavar="DIR")

    solve = sub.add_parser("solve", parents=[common], help="soluzione esatta nativa")
    solve.add_argument("--method", choices=("enum", "bnb"), default="bnb")
    solve.add_argument("--unweighted-time", action="store_false", dest="time_weighted")

    export = sub.add_parser("export-milp", parents=[common], help="export del modello MILP")
    export.add_argument("--variant", choices=[v.value for v in Variant], default=Variant.F1L_FLOW.value)
    export.add_argument("--cuts", default="")
    export.add_argument("--milp-format", choices=MILP_FORMATS, default="mps", dest="milp_format")

    loop = sub.add_parser("cut-loop", parents=[common], help="verifica di una soluzione esterna e tagli SEC")
    loop.add_argument("--variant", choices=[v.value for v in Variant], default=Variant.F1L_SEC.value)
    loop.add_argument("--cuts", default="")
    loop.add_argument("--solution", required=False, help="file di soluzione del solutore esterno")
    loop.add_argument("--unweighted-time", action="store_false", dest="time_weighted")

    geo = sub.add_parser("geojson", parents=[common], help="export GeoJSON della linea")
    geo.add_argument("--solution", help="solution.csv prodotto da solve")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.replay:
        config = RunConfig.load(args.replay)
        logger.log_run_action("Replay", f"{args.replay} ({config.command})")
        return config
    if not args.instance:
        raise ValidationError("--instance è obbligatorio")
    values = {key: value for key, value in vars(args).items() if value is not None}
    values['command'] = args.command
    return RunConfig.from_dict(values)


def _load(config: RunConfig) -> Tuple[Instance, float]:
    """Carica e prepara l'istanza; restituisce anche il tempo di preparazione."""
    start = time.perf_counter()
    instance = load_instance(
        config.instance, config.format,
        subset=config.n,
        overrides=config.overrides(),
        ordered_pairs=config.ordered_pairs,
    )
    seed = config.seed
    if seed is None:
        rule = instance.params.revenue
        seed = rule.seed if isinstance(rule, GammaRule) else DEFAULT_SEED
    instance = prepare_instance(instance, config.sparsify, seed)
    return instance, time.perf_counter() - start


def _effective_parameters(config: RunConfig, instance: Instance) -> Dict:
    data = config.to_dict()
    data['effective'] = instance.params.to_dict()
    data['effective']['n'] = instance.n
    data['effective']['edges'] = len(instance.edges)
    data['effective']['commodities'] = len(instance.commodities)
    return data


def _flag_capped_bounds(report: RunReport, bounds) -> int:
    """Segna nel report i bound troncati da k_cap; l'esecuzione termina con codice 3."""
    capped = sorted(commodity for commodity, bound in bounds.items() if bound.capped)
    if capped:
        report.exit_status = EXIT_CAPPED
        report.result['capped_commodities'] = [list(commodity) for commodity in capped]
        logger.warning(f"⚠ [RUN] {len(capped)} bound troncati da k_cap: risultato non certificato")
    return len(capped)


def cmd_prep(config: RunConfig, report: RunReport, out: Path):
    start = time.perf_counter()
    instance, t_load = _load(config)
    report.parameters = _effective_parameters(config, instance)
    derived = derive_times(instance)
    bounds = compute_all_bounds(instance, config.workers, derived, config.k_cap)
    report.add_timing('t_prep', time.perf_counter() - start)
    report.add_timing('t_load', t_load)
    path = write_bounds(instance, bounds, out / BOUNDS_FILE)
    report.outputs['bounds'] = str(path)
    report.result = {
        'triangle_inequality': check_triangle_inequality(instance.time),
        'access_time': derived.access[0],
        'sum_ub': sum(b.ub for b in bounds.values()),
        'capped': 0,
    }
    report.result['capped'] = _flag_capped_bounds(report, bounds)
    print(f"t_prep={report.timings['t_prep']:.3f}s  somma bound={report.result['sum_ub']:.6g}")


def _candidates(config: RunConfig, instance: Instance, report: RunReport, dump_aux=None):
    derived = derive_times(instance)
    candidates, stats = enumerate_all(instance, config.workers, derived, dump_aux)
    report.add_timing('t_path', stats.t_path)
    report.result['paths'] = stats.to_dict()
    if stats.errors:
        details = "; ".join(f"{c}: {msg}" for c, msg in stats.errors.items())
        raise HubLineError(f"generazione cammini fallita per {len(stats.errors)} commodity ({details})")
    return candidates, derived


def cmd_paths(config: RunConfig, report: RunReport, out: Path):
    instance, t_load = _load(config)
    report.parameters = _effective_parameters(config, instance)
    report.add_timing('t_load', t_load)
    candidates, _ = _candidates(config, instance, report, config.dump_aux)
    path = write_candidates(instance, candidates, out / CANDIDATES_FILE)
    report.outputs['candidates'] = str(path)
    report.result['checksum'] = file_checksum(path)
    stats = report.result['paths']
    types = "  ".join(f"{k}={v}" for k, v in stats['per_type'].items())
    print(f"n_path={stats['n_path']}  t_path={stats['t_path']:.3f}s  {types}")


def cmd_solve(config: RunConfig, report: RunReport, out: Path):
    instance, t_load = _load(config)
    report.parameters = _effective_parameters(config, instance)
    report.add_timing('t_load', t_load)
    candidates, derived = _candidates(config, instance, report)
    if config.method == "enum":
        solution = solve_enumerate(instance, candidates, config.line_cap, config.time_weighted)
    else:
        start = time.perf_counter()
        bounds = compute_all_bounds(instance, config.workers, derived, config.k_cap)
        report.add_timing('t_bounds', time.perf_counter() - start)
        _flag_capped_bounds(report, bounds)
        solution = solve_bnb(instance, candidates, bounds, config.node_cap, config.time_weighted)
    report.add_timing('t_solve', solution.stats.get('t_solve', 0.0))
    path = write_solution_csv(instance, solution, out / SOLUTION_FILE)
    report.outputs['solution'] = str(path)
    report.result['solution'] = solution_summary(solution)
    report.result['checksum'] = file_checksum(path)
    metrics = solution.metrics
    print(f"linea={solution.line}  obiettivo={solution.objective:.12g}")
    print(f"coppie servite={metrics.pct_od_served:.2f}%  domanda servita={metrics.pct_demand_served:.2f}%  "
          f"tempo risparmiato={metrics.pct_time_saved:.2f}%")


def _load_sec_registry(path: Path) -> List[SecCut]:
    if not path.exists():
        return []
    with open(path, 'r', encoding='utf-8') as f:
        data = json.load(f)
    return [SecCut.from_dict(item) for item in data.get('cuts', [])]


def _save_sec_registry(path: Path, cuts) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump({'cuts': [cut.to_dict() for cut in cuts]}, f, indent=2)
    return path


def _build_model(config: RunConfig, instance: Instance, candidates, out: Path):
    model = build_milp(instance, candidates, config.variant, parse_cuts(config.cuts))
    registry = _load_sec_registry(out / SEC_CUTS_FILE)
    if registry and model.variant is Variant.F1L_SEC:
        model = add_cuts(model, instance, registry)
    return model


def cmd_export_milp(config: RunConfig, report: RunReport, out: Path):
    fmt = config.milp_format
    instance, t_load = _load(config)
    report.parameters = _effective_parameters(config, instance)
    report.add_timing('t_load', t_load)
    candidates, _ = _candidates(config, instance, report)
    model = _build_model(config, instance, candidates, out)
    path = export_model(model, fmt, out / f"{model.name}.{fmt}")
    report.outputs['model'] = str(path)
    report.result['model'] = {
        'variables': model.variable_count,
        'rows': model.row_count,
        'sec_cuts': len(model.sec_cuts),
        'checksum': file_checksum(path),
    }
    print(f"{path}: {model.variable_count} variabili, {model.row_count} righe")


def cmd_cut_loop(config: RunConfig, report: RunReport, out: Path):
    if not config.solution:
        raise ValidationError("cut-loop richiede --solution")
    instance, t_load = _load(config)
    report.parameters = _effective_parameters(config, instance)
    report.add_timing('t_load', t_load)
    candidates, _ = _candidates(config, instance, report)
    model = _build_model(config, instance, candidates, out)
    values = import_solution(model, config.solution)
    verification = verify_solution(instance, candidates, model, values, config.time_weighted)

    if verification.cuts:
        if model.variant is not Variant.F1L_SEC:
            verification.raise_for_violations()
        model = add_cuts(model, instance, verification.cuts)
        registry_path = _save_sec_registry(out / SEC_CUTS_FILE, model.sec_cuts)
        path = export_model(model, "mps", out / f"{model.name}.mps")
        report.outputs.update({'model': str(path), 'sec_cuts': str(registry_path)})
        report.result['cut_loop'] = {
            'converged': False,
            'new_cuts': [cut.to_dict() for cut in verification.cuts],
            'total_cuts': len(model.sec_cuts),
        }
        logger.log_milp_action("⚠ Subtour rilevati", f"{len(verification.cuts)} nuovi tagli SEC, modello in {path}")
        print(f"subtour: {len(verification.cuts)} nuovi tagli, modello aggiornato in {path}")
        return

    verification.raise_for_violations()
    solution = verification.solution
    path = write_solution_csv(instance, solution, out / SOLUTION_FILE)
    report.outputs['solution'] = str(path)
    report.result['cut_loop'] = {'converged': True, 'total_cuts': len(model.sec_cuts)}
    report.result['solution'] = solution_summary(solution)
    logger.log_milp_action("✓ Ciclo di tagli convergente", f"linea={solution.line}, obiettivo={solution.objective:.6g}")
    print(f"convergenza: linea={solution.line}  obiettivo={solution.objective:.12g}")


def cmd_geojson(config: RunConfig, report: RunReport, out: Path):
    instance, t_load = _load(config)
    report.parameters = _effective_parameters(config, instance)
    report.add_timing('t_load', t_load)
    solution = None
    if config.solution:
        nodes = read_solution_line(config.solution)
        if nodes is not None:
            candidates, _ = _candidates(config, instance, report)
            solution = evaluate_line(instance, candidates, HubLine(tuple(nodes)), config.time_weighted)
    path = write_geojson(instance, solution, out / GEOJSON_FILE)
    report.outputs['geojson'] = str(path)
    print(f"GeoJSON: {path}")


def _exit_code(error: BaseException) -> int:
    if isinstance(error, (CappedEnumerationError, GuardRefusalError, NodeLimitError)):
        return EXIT_CAPPED
    if isinstance(error, (ValidationError, ContractViolation, InfeasibleAssignmentError)):
        return EXIT_VALIDATION
    if isinstance(error, OSError):
        return EXIT_IO
    return EXIT_VALIDATION


def run(config: RunConfig) -> RunReport:
    """Esegue un comando e restituisce il report (le eccezioni si propagano)."""
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    report = RunReport(command=config.command, parameters=config.to_dict())
    start = time.perf_counter()
    logger.log_run_action(f"Comando {config.command} avviato", f"istanza={config.instance}")
    handlers = {
        'prep': cmd_prep,
        'paths': cmd_paths,
        'solve': cmd_solve,
        'export-milp': cmd_export_milp,
        'cut-loop': cmd_cut_loop,
        'geojson': cmd_geojson,
    }
    if config.command in handlers:
        handlers[config.command](config, report, out)
    else:
        raise ValidationError(f"comando sconosciuto: {config.command}")
    report.add_timing('t_total', time.perf_counter() - start)
    report.save(out / RUN_REPORT_FILE)
    logger.log_run_action(f"✓ Comando {config.command} completato", format_time(report.timings['t_total']))
    return report


def _save_failed_report(config: Optional[RunConfig], error: BaseException, code: int):
    if config is None:
        return
    failed = RunReport(command=config.command, parameters=config.to_dict(),
                       result={'error': f"{type(error).__name__}: {error}"}, exit_status=code)
    try:
        failed.save(Path(config.out) / RUN_REPORT_FILE)
    except OSError:
        pass


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        logger.set_console_level("DEBUG")
    if args.log_file:
        logger.setup_file_logging(Path(args.log_file))

    status = check_dependencies()
    logger.log_dependency_check(status['missing'])
    if not status['all_ok']:
        return EXIT_VALIDATION

    config = None
    try:
        config = config_from_args(args)
        report = run(config)
        return report.exit_status
    except (HubLineError, OSError) as e:
        code = _exit_code(e)
        logger.log_error(f"✗ [RUN] {type(e).__name__}: {e}", e)
        _save_failed_report(config, e, code)
        return code
    except Exception as e:
        logger.log_error(f"✗ [RUN] Errore imprevisto {type(e).__name__}: {e}", e)
        _save_failed_report(config, e, EXIT_FAILURE)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
