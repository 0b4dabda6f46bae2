"""
Batch command line for the toolkit.

Each command reads its input (a matrix-sequence or problem JSON file, or
only flags), runs one computation and writes a JSON report plus, where the
command yields a table, a CSV next to it. Exit status: 0 on success, 1 on
input errors, 2 when the computation flagged its own result.
"""

# Standard library imports
import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

# Third-party imports
import numpy as np
import pandas as pd

# Local imports
from config import APP_CONFIG, LOGGING_SETTINGS, RUN_DEFAULTS
from constructor import build_counterexample, build_uss, counterexample_diagnostics
from hyperbolic import FiniteBlaschke, pseudo_distance, rho_split
from interpolator import (
    beurling_functions,
    beurling_reconstruct,
    beurling_sum,
    check_grid,
    hermite_data_from_matrices,
    interpolation_constant_report,
    load_problem,
    minimal_norm,
    solve,
)
from lib.report_writer import table_path_for, write_json_report, write_table
from lib.utils import (
    InputError,
    NumericalDiagnostic,
    expand_schedule,
    first_error,
    toolkit_logger,
    validate_tolerance,
)
from matrix_calculus import (
    SpectralData,
    apply_function,
    blaschke_jets,
    blaschke_of_matrix,
    constant_jets,
    load_sequence,
    sequence_to_payload,
)
from model_space import (
    frame_bounds,
    frame_separation_sweep,
    model_basis,
    monomial_frame_counterexample,
    project,
    self_test,
    separation_witness,
    sine,
    subspace_strong_separation,
    weak_subspace_separation,
)
from separation import (
    landscape,
    nikolski_pairwise,
    strong_separation,
    uniform_strong_separation,
    weak_separation,
)

COMMANDS = ('separation', 'construct', 'counterexample', 'modelspace', 'interpolate', 'beurling', 'framebounds')
DEFAULT_GAMMAS = (0.5, 0.1, 0.02)
KRONECKER_TOL = 1e-8
MATRIX_TOL = 1e-7

EPILOG = """\
examples:
  python cli.py separation --input sequence.json --out reports/separation.json
  python cli.py construct --delta 0.5 --nu 1.5 --n 5 --m ones
  python cli.py counterexample --m linear --nu 0.5 --n 6 --out reports/counter.json
  python cli.py interpolate --input problem.json
  python cli.py beurling --input sequence.json --slack 0.1
  python cli.py framebounds --gammas 0.5,0.1,0.02

CSV columns:
  separation      re, im, value                  (leave-one-out product landscape)
  construct       n, multiplicity, point, depth, gap, radius, target, achieved, scanned, stated_bound
  counterexample  n, t, t^m, s, s^m, leaveoneout_at_xi, strong_separation, uniform_separation, ratio
  interpolate     theta, re, im, modulus         (boundary trace of the extremal interpolant)
  beurling        re, im, sum                    (sum of |f_j| on the check grid)
  framebounds     parameter, lower, upper        (or set, size, uniform_strong_separation, lower, upper, ratio)

See docs/SCHEMA.md for the input formats.
"""

# -----------------------------------------------------------
# Run configuration
# -----------------------------------------------------------
@dataclass
class RunConfig:
    command: str
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    tol: float = RUN_DEFAULTS['tol']
    seed: int = RUN_DEFAULTS['seed']
    grid_depth: int = RUN_DEFAULTS['grid_depth']
    options: Dict[str, Any] = field(default_factory=dict)

    def validate(self) -> Tuple[bool, str]:
        if self.command not in COMMANDS:
            return False, f"unknown command {self.command!r}"
        checks = [validate_tolerance(self.tol)]
        if self.grid_depth < 1:
            checks.append((False, f"grid depth {self.grid_depth} must be positive"))
        message = first_error(checks)
        return (False, message) if message else (True, '')

    @property
    def report_path(self) -> Path:
        return Path(self.output_path or os.path.join('reports', f"{self.command}.json"))


def _option(config: RunConfig, name: str, default: Any = None) -> Any:
    value = config.options.get(name)
    return default if value is None else value


def _read_json(path: Optional[str], command: str) -> Any:
    if not path:
        raise InputError(f"{command} needs --input")
    with open(path, 'r', encoding='utf-8') as handle:
        return json.load(handle)

# -----------------------------------------------------------
# Commands
# -----------------------------------------------------------
def _run_separation(config: RunConfig) -> Tuple[Dict[str, Any], Optional[pd.DataFrame], bool]:
    sequence = load_sequence(_read_json(config.input_path, 'separation'))
    factors = [blaschke_of_matrix(matrix) for matrix in sequence]
    report = uniform_strong_separation(factors, tol=config.tol, grid_depth=config.grid_depth)
    points = [(point, order) for matrix in sequence for point, order in matrix.entries]
    result: Dict[str, Any] = {
        'matrices': sequence_to_payload(sequence),
        'uniform_strong_separation': report.as_dict(),
        'strong_separation': strong_separation(points),
        'nikolski_pairwise': nikolski_pairwise(points),
    }
    if len(points) > 1:
        result['weak_separation'] = weak_separation([point for point, _ in points])
    table = landscape(factors, radial=4 * config.grid_depth, angular=8 * config.grid_depth)
    return result, table, not report.converged


def _run_construct(config: RunConfig) -> Tuple[Dict[str, Any], Optional[pd.DataFrame], bool]:
    n_max = int(_option(config, 'n', 5))
    multiplicities = expand_schedule(_option(config, 'm', 'ones'), n_max)
    trace = build_uss(multiplicities, float(_option(config, 'delta', 0.5)), float(_option(config, 'nu', 1.5)), n_max, config.tol)
    radii = (np.nan,) + tuple(trace.radii)
    table = pd.DataFrame({
        'n': np.arange(1, len(trace.points) + 1),
        'multiplicity': trace.multiplicities[:len(trace.points)],
        'point': trace.points,
        'depth': trace.depths,
        'gap': trace.gaps,
        'radius': radii[:len(trace.points)],
        'target': trace.targets,
        'achieved': trace.achieved,
        'scanned': trace.scanned,
        'stated_bound': trace.stated_bounds,
    })
    return trace.as_dict(), table, bool(trace.diagnostics)


def _run_counterexample(config: RunConfig) -> Tuple[Dict[str, Any], Optional[pd.DataFrame], bool]:
    n_max = int(_option(config, 'n', 6))
    multiplicities = expand_schedule(_option(config, 'm', 'linear'), 2 * n_max)
    trace = build_counterexample(multiplicities, float(_option(config, 'nu', 0.5)), n_max)
    table = counterexample_diagnostics(trace, config.tol)
    checks = dict(table.attrs.get('checks', {}))
    result = trace.as_dict()
    result['checks'] = checks
    return result, table, bool(trace.diagnostics) or not all(checks.values())


def _run_modelspace(config: RunConfig) -> Tuple[Dict[str, Any], Optional[pd.DataFrame], bool]:
    sequence = load_sequence(_read_json(config.input_path, 'modelspace'))
    bases = [model_basis(blaschke_of_matrix(matrix), matrix.label) for matrix in sequence]
    result: Dict[str, Any] = {'bases': [basis.as_dict() for basis in bases]}
    lower, upper = frame_bounds(bases)
    result['frame_bounds'] = {'lower': lower, 'upper': upper}
    if len(bases) > 1:
        result['sines'] = [[sine(K, L) if K is not L else 0.0 for L in bases] for K in bases]
        result['subspace_strong_separation'] = subspace_strong_separation(bases)
        result['weak_subspace_separation'] = weak_subspace_separation(bases)
        B1, B2 = blaschke_of_matrix(sequence[0]), blaschke_of_matrix(sequence[1])
        scan = uniform_strong_separation([B1, B2], tol=config.tol, grid_depth=config.grid_depth)
        witness = separation_witness(B1, B2, scan.argmin_point)
        result['witness'] = dict(witness.as_dict(), point=scan.argmin_point, holds=witness.holds())
        return result, None, not witness.holds()
    return result, None, False


def _run_interpolate(config: RunConfig) -> Tuple[Dict[str, Any], Optional[pd.DataFrame], bool]:
    sequence, targets = load_problem(_read_json(config.input_path, 'interpolate'))
    data = hermite_data_from_matrices(sequence, targets)
    interpolant = solve(data, seed=config.seed)
    errors = []
    for matrix, target in zip(sequence, targets):
        produced = apply_function(interpolant.jet_provider(), matrix).entries
        expected = apply_function(target, matrix).entries
        errors.append(float(np.max(np.abs(produced - expected))))
    result = {
        'matrices': sequence_to_payload(sequence),
        'hermite_data': data.as_dict(),
        'minimal_norm': interpolant.norm,
        'solution': interpolant.as_dict(),
        'matrix_errors': errors,
    }
    flagged = interpolant.flagged or max(errors) > MATRIX_TOL
    return result, interpolant.boundary_trace(), flagged


def _run_beurling(config: RunConfig) -> Tuple[Dict[str, Any], Optional[pd.DataFrame], bool]:
    payload = _read_json(config.input_path, 'beurling')
    sequence = load_sequence(payload)
    slack = float(_option(config, 'slack', RUN_DEFAULTS['slack']))
    trials = int(_option(config, 'trials', RUN_DEFAULTS['trials']))
    functions = beurling_functions(sequence, slack, trials, config.seed)

    kronecker = []
    for function in functions:
        row = []
        for position, matrix in enumerate(sequence):
            image = apply_function(function.jet_provider(), matrix).entries
            expected = np.eye(image.shape[0]) * (1.0 if position + 1 == function.index else 0.0)
            row.append(float(np.max(np.abs(image - expected))))
        kronecker.append(row)
    grid = check_grid(config.grid_depth)
    sums = beurling_sum(functions, grid)
    bound = functions[0].bound
    result: Dict[str, Any] = {
        'matrices': sequence_to_payload(sequence),
        'slack': slack,
        'bound': bound,
        'grid_sup': float(sums.max()),
        'kronecker_errors': kronecker,
        'solution_norms': [solution.norm for solution in functions[0].solutions],
    }
    if isinstance(payload, dict) and 'targets' in payload:
        _, targets = load_problem(payload)
        reconstruction = beurling_reconstruct(functions, targets)
        result['reconstruction_errors'] = [
            float(np.max(np.abs(apply_function(reconstruction, matrix).entries - apply_function(target, matrix).entries)))
            for matrix, target in zip(sequence, targets)
        ]
    table = pd.DataFrame({'re': grid.real, 'im': grid.imag, 'sum': sums})
    worst = max(max(row) for row in kronecker)
    return result, table, worst > KRONECKER_TOL or result['grid_sup'] > bound


def _run_framebounds(config: RunConfig) -> Tuple[Dict[str, Any], Optional[pd.DataFrame], bool]:
    if config.input_path:
        payload = _read_json(config.input_path, 'framebounds')
        point_sets = payload.get('point_sets') if isinstance(payload, dict) else payload
        if not isinstance(point_sets, list) or not point_sets:
            raise InputError("point_sets: expected a nonempty list of point lists")
        sequences = [load_sequence([{'eigenvalues': points}]) for points in point_sets]
        table = frame_separation_sweep(
            [[point for point, _ in sequence[0].entries] for sequence in sequences], tol=config.tol
        )
        return {'sweep': table.to_dict(orient='records')}, table, False

    gammas = _option(config, 'gammas', DEFAULT_GAMMAS)
    rows = []
    for gamma in gammas:
        lower, upper = frame_bounds(monomial_frame_counterexample(float(gamma)))
        rows.append({'parameter': float(gamma), 'lower': lower, 'upper': upper})
    table = pd.DataFrame(rows, columns=['parameter', 'lower', 'upper'])
    return {'gamma_sweep': rows}, table, False


RUNNERS = {
    'separation': _run_separation,
    'construct': _run_construct,
    'counterexample': _run_counterexample,
    'modelspace': _run_modelspace,
    'interpolate': _run_interpolate,
    'beurling': _run_beurling,
    'framebounds': _run_framebounds,
}

# -----------------------------------------------------------
# Entry points
# -----------------------------------------------------------
def run(config: RunConfig) -> int:
    """Execute one command; return 0 (ok), 1 (input error) or 2 (numerical diagnostic)."""
    ok, message = config.validate()
    if not ok:
        toolkit_logger.error("Invalid run configuration: %s", message)
        print(f"error: {message}", file=sys.stderr)
        return 1
    try:
        result, table, flagged = RUNNERS[config.command](config)
    except json.JSONDecodeError as exc:
        toolkit_logger.error("Malformed JSON in %s", config.input_path, exc_info=True)
        print(f"error: {config.input_path}: line {exc.lineno}, column {exc.colno}: {exc.msg}", file=sys.stderr)
        return 1
    except (InputError, FileNotFoundError) as exc:
        toolkit_logger.error("%s failed on input: %s", config.command, exc, exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalDiagnostic as exc:
        toolkit_logger.error("%s stopped on a numerical diagnostic: %s", config.command, exc, exc_info=True)
        print(f"numerical diagnostic: {exc}", file=sys.stderr)
        return 2

    report = {
        'command': config.command,
        'parameters': {
            'input': config.input_path,
            'tol': config.tol,
            'seed': config.seed,
            'grid_depth': config.grid_depth,
            'options': {key: value for key, value in sorted(config.options.items()) if value is not None},
        },
        'flagged': flagged,
        'result': result,
    }
    write_json_report(config.report_path, report)
    if table is not None:
        write_table(table_path_for(config.report_path), table)
    if flagged:
        toolkit_logger.warning("%s finished with flagged results", config.command)
        return 2
    toolkit_logger.info("%s finished", config.command)
    return 0


def _float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(',') if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a comma separated list of numbers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Separation, construction, model-space and interpolation computations on the unit disk",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", dest="input_path", help="Input JSON file")
    common.add_argument("--out", dest="output_path", help="Report path (default: reports/<command>.json); CSV goes next to it")
    common.add_argument("--tol", type=float, default=RUN_DEFAULTS['tol'], help="Scan tolerance in (0, 0.1]")
    common.add_argument("--seed", type=int, default=RUN_DEFAULTS['seed'], help="Seed for every random draw")
    common.add_argument("--grid-depth", dest="grid_depth", type=int, default=RUN_DEFAULTS['grid_depth'],
                        help="Refinement depth of scans and check grids")

    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser('separation', parents=[common], help="Separation functionals of a matrix sequence")

    construct = commands.add_parser('construct', parents=[common], help="Uniformly strongly separated sequence")
    construct.add_argument("--delta", type=float, default=0.5)
    construct.add_argument("--nu", type=float, default=1.5)
    construct.add_argument("--n", type=int, default=5, help="Number of points")
    construct.add_argument("--m", default='ones', help="Multiplicities: linear, ones or a comma list (cycled)")

    counter = commands.add_parser('counterexample', parents=[common],
                                  help="Strongly but not uniformly strongly separated sequence")
    counter.add_argument("--nu", type=float, default=0.5)
    counter.add_argument("--n", type=int, default=6, help="Number of pairs")
    counter.add_argument("--m", default='linear', help="Strictly increasing multiplicities: linear or a comma list")

    commands.add_parser('modelspace', parents=[common], help="Model spaces, sines, frame bounds and witness")
    commands.add_parser('interpolate', parents=[common], help="Minimal-norm interpolant of a problem file")

    beurling = commands.add_parser('beurling', parents=[common], help="Beurling functions of a matrix sequence")
    beurling.add_argument("--slack", type=float, default=RUN_DEFAULTS['slack'])
    beurling.add_argument("--trials", type=int, default=RUN_DEFAULTS['trials'])

    frames = commands.add_parser('framebounds', parents=[common], help="Frame bound sweeps")
    frames.add_argument("--gammas", type=_float_list, default=None, help="Comma list of gamma values")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    known = {'command', 'input_path', 'output_path', 'tol', 'seed', 'grid_depth'}
    config = RunConfig(
        command=args.command,
        input_path=args.input_path,
        output_path=args.output_path,
        tol=args.tol,
        seed=args.seed,
        grid_depth=args.grid_depth,
        options={key: value for key, value in vars(args).items() if key not in known},
    )
    return run(config)

# -----------------------------------------------------------
# Operational self checks
# -----------------------------------------------------------
def run_self_checks() -> List[Dict[str, str]]:
    """Small numerical checks of every layer, as ``{'name', 'status', 'detail'}`` rows."""
    results = []

    if APP_CONFIG:
        results.append({'name': 'Config', 'status': 'OK', 'detail': 'APP_CONFIG is loaded'})
    else:
        results.append({'name': 'Config', 'status': 'ERROR', 'detail': 'APP_CONFIG is empty'})

    log_dir = LOGGING_SETTINGS['dir']
    if os.access(log_dir, os.W_OK):
        results.append({'name': 'Log Folder', 'status': 'OK', 'detail': f'"{log_dir}" is writable'})
    else:
        results.append({'name': 'Log Folder', 'status': 'ERROR', 'detail': f'"{log_dir}" is not writable'})

    try:
        gamma, s = rho_split(0.2, 0.7, 0.4)
        direct = pseudo_distance(gamma, 0.7)
        status = 'OK' if abs(direct - s) < 1e-10 else 'ERROR'
        results.append({'name': 'Distance Split', 'status': status, 'detail': f'closed form {s:.12f}, direct {direct:.12f}'})
    except Exception as e:
        results.append({'name': 'Distance Split', 'status': 'ERROR', 'detail': str(e)})

    try:
        matrix = SpectralData.from_pairs([(0.3, 2), (-0.5j, 1)], 'check')
        residual = float(np.max(np.abs(apply_function(blaschke_jets(blaschke_of_matrix(matrix)), matrix).entries)))
        status = 'OK' if residual < 1e-10 else 'ERROR'
        results.append({'name': 'Annihilation', 'status': status, 'detail': f'|B_A(A)| = {residual:.3e}'})
    except Exception as e:
        results.append({'name': 'Annihilation', 'status': 'ERROR', 'detail': str(e)})

    try:
        worst = self_test()
        results.append({'name': 'Kernel Inner Products', 'status': 'OK', 'detail': f'max finite-difference error {worst:.3e}'})
    except Exception as e:
        results.append({'name': 'Kernel Inner Products', 'status': 'ERROR', 'detail': str(e)})

    try:
        basis = model_basis(FiniteBlaschke.from_zeros([0.2, -0.4 + 0.3j]))
        _, distance = project(0.5j, basis)
        expected = float(abs(basis.source(0.5j)))
        status = 'OK' if abs(distance - expected) < 1e-8 else 'ERROR'
        results.append({'name': 'Distance Formula', 'status': status, 'detail': f'{distance:.12f} vs {expected:.12f}'})
    except Exception as e:
        results.append({'name': 'Distance Formula', 'status': 'ERROR', 'detail': str(e)})

    try:
        sequence = [SpectralData.from_pairs([(0.0, 1)], 'A1'), SpectralData.from_pairs([(0.5, 1)], 'A2')]
        data = hermite_data_from_matrices(sequence, [constant_jets(1.0), constant_jets(1.0)])
        norm = minimal_norm(data)
        status = 'OK' if abs(norm - 1.0) < 1e-9 else 'ERROR'
        results.append({'name': 'Minimal Norm', 'status': status, 'detail': f'constant data gives {norm:.12f}'})
    except Exception as e:
        results.append({'name': 'Minimal Norm', 'status': 'ERROR', 'detail': str(e)})

    try:
        report = interpolation_constant_report([SpectralData.from_pairs([(0.3, 1)], 'A1')], trials=2, with_separation=False)
        status = 'OK' if abs(report.value - 1.0) < 1e-9 else 'ERROR'
        results.append({'name': 'Interpolation Constant', 'status': status, 'detail': f'single node gives {report.value:.12f}'})
    except Exception as e:
        results.append({'name': 'Interpolation Constant', 'status': 'ERROR', 'detail': str(e)})

    return results


if __name__ == '__main__':
    sys.exit(main())
