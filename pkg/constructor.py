"""
Constructive searches on the real diameter.

``build_uss`` places points one at a time so that every prefix is uniformly
strongly separated with an explicit bound; ``build_counterexample`` places
pairs so that the sequence stays strongly separated while the leave-one-out
products at the pair midpoints collapse.

Both searches run in depth coordinates ``s = artanh(x)``: the points approach
the unit circle doubly exponentially and leave double precision after a few
steps, while their depths stay moderate. ``points`` in the traces are
``tanh(depth)`` and may round to 1.0; ``depths`` and ``gaps`` are exact.
"""

# Standard library imports
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

# Third-party imports
import numpy as np
import pandas as pd

# Local imports
from config import CONSTRUCTION_SETTINGS, SCAN_SETTINGS
from hyperbolic import depth_distance, depth_of, gap_at_depth, log_tanh, point_at_depth, rho_split
from lib.utils import (
    ConstructionError,
    InputError,
    first_error,
    toolkit_logger,
    validate_multiplicities,
    validate_open_interval,
)
from separation import strong_separation_on_geodesic, uniform_strong_separation_on_geodesic

# -----------------------------------------------------------
# Trace types
# -----------------------------------------------------------
@dataclass(frozen=True)
class ConstructionTrace:
    multiplicities: Tuple[int, ...]
    points: Tuple[float, ...]
    depths: Tuple[float, ...]
    gaps: Tuple[float, ...]
    radii: Tuple[float, ...]
    radius_depths: Tuple[float, ...]
    achieved: Tuple[float, ...]
    scanned: Tuple[float, ...]
    targets: Tuple[float, ...]
    stated_bounds: Tuple[float, ...]
    target_delta: float
    nu: float
    diagnostics: Tuple[str, ...] = field(default_factory=tuple)

    def as_dict(self) -> Dict[str, Any]:
        return {
            'target_delta': self.target_delta,
            'nu': self.nu,
            'multiplicities': list(self.multiplicities),
            'points': list(self.points),
            'depths': list(self.depths),
            'gaps': list(self.gaps),
            'radii': list(self.radii),
            'radius_depths': list(self.radius_depths),
            'achieved': list(self.achieved),
            'scanned': list(self.scanned),
            'targets': list(self.targets),
            'stated_bounds': list(self.stated_bounds),
            'diagnostics': list(self.diagnostics),
        }


@dataclass(frozen=True)
class CounterexampleTrace:
    multiplicities: Tuple[int, ...]
    points: Tuple[float, ...]
    depths: Tuple[float, ...]
    gaps: Tuple[float, ...]
    midpoints: Tuple[float, ...]
    midpoint_depths: Tuple[float, ...]
    pair_distances: Tuple[float, ...]
    t_values: Tuple[float, ...]
    s_values: Tuple[float, ...]
    s_direct: Tuple[float, ...]
    budgets: Tuple[float, ...]
    nu: float
    diagnostics: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def pairs(self) -> int:
        return len(self.t_values)

    def as_dict(self) -> Dict[str, Any]:
        return {
            'nu': self.nu,
            'multiplicities': list(self.multiplicities),
            'points': list(self.points),
            'depths': list(self.depths),
            'gaps': list(self.gaps),
            'midpoints': list(self.midpoints),
            'midpoint_depths': list(self.midpoint_depths),
            'pair_distances': list(self.pair_distances),
            't_values': list(self.t_values),
            's_values': list(self.s_values),
            's_direct': list(self.s_direct),
            'budgets': list(self.budgets),
            'diagnostics': list(self.diagnostics),
        }

# -----------------------------------------------------------
# Depth search helpers
# -----------------------------------------------------------
def _tighten(value: float) -> float:
    """Move ``value`` toward 1 by the configured margin of its gap."""
    return value + CONSTRUCTION_SETTINGS['threshold_margin'] * (1.0 - value)


def _depth_for_power(value: float, multiplicity: int) -> float:
    """Depth offset ``artanh(value^(1/m))``, accurate when the root is close to 1."""
    exponent = np.log(value) / multiplicity
    root = np.exp(exponent)
    return 0.5 * (np.log1p(root) - np.log(-np.expm1(exponent)))


def _search_depth(condition: Callable[[float], bool], start: float, step: int) -> float:
    """Smallest depth at or beyond ``start`` satisfying a monotone ``condition``."""
    if condition(start):
        return start
    max_depth = CONSTRUCTION_SETTINGS['max_depth']
    low, stride = start, 1.0
    high = low + stride
    while not condition(high):
        low = high
        stride *= 2.0
        high = low + stride
        if high > max_depth:
            raise ConstructionError(f"search passed the depth cap {max_depth:g}", step)
    tol = CONSTRUCTION_SETTINGS['bisection_tol']
    for _ in range(CONSTRUCTION_SETTINGS['max_bisection']):
        if high - low <= tol * max(1.0, high):
            break
        middle = 0.5 * (low + high)
        if condition(middle):
            high = middle
        else:
            low = middle
    return high


def _log_product(depth: float, depths: Sequence[float], multiplicities: Sequence[int]) -> float:
    if len(depths) == 0:
        return 0.0
    distances = np.abs(depth - np.asarray(depths, dtype=float))
    return float(np.asarray(multiplicities, dtype=float) @ log_tanh(distances))


def _check_cap(depth: float, step: int) -> None:
    if depth > CONSTRUCTION_SETTINGS['max_depth']:
        raise ConstructionError(f"depth {depth:.6g} passed the cap {CONSTRUCTION_SETTINGS['max_depth']:g}", step)

# -----------------------------------------------------------
# Uniformly strongly separated sequences
# -----------------------------------------------------------
def build_uss(multiplicities: Sequence[int], delta: float, nu: float, n_max: int, tol: Optional[float] = None) -> ConstructionTrace:
    """
    Inductive construction with leave-one-out infimum at least
    ``delta * nu^(1 - 1/4 - ... - 1/2^(n-1))`` after ``n >= 2`` points.

    Step ``n``: the radius ``r_n`` is the least depth beyond which the product
    of the first ``n`` factors stays above the next target; the new point is
    then placed so its factor exceeds ``c_n`` on ``|z| <= r_n``, with
    ``c_1 = delta * nu`` and ``c_n = nu^(-2^-n)``. Each prefix is re-verified
    by the certified geodesic scan.
    """
    multiplicities = list(multiplicities)
    message = first_error([
        validate_open_interval(delta, 0.0, 1.0, 'delta'),
        validate_open_interval(nu, 1.0, 1.0 / delta if 0.0 < delta < 1.0 else np.inf, 'nu'),
        validate_multiplicities(multiplicities),
    ])
    if message:
        raise InputError(message)
    if n_max < 1 or len(multiplicities) < n_max:
        raise InputError(f"need n_max >= 1 and at least n_max multiplicities, got n_max={n_max}, {len(multiplicities)} given")
    tol = SCAN_SETTINGS['tol'] if tol is None else float(tol)

    depths: List[float] = [float(depth_of(CONSTRUCTION_SETTINGS['first_point']))]
    radius_depths: List[float] = []
    targets: List[float] = [1.0]
    achieved: List[float] = [1.0]
    scanned: List[float] = [1.0]
    stated: List[float] = [1.0]
    diagnostics: List[str] = []

    for n in range(1, n_max):
        target = targets[-1]
        factor = delta * nu if n == 1 else nu ** (-(2.0 ** -n))
        next_target = target * factor
        log_threshold = np.log(_tighten(next_target))
        prefix = multiplicities[:n]

        radius_depth = _search_depth(
            lambda s: _log_product(s, depths, prefix) >= log_threshold,
            depths[-1],
            n + 1,
        )
        new_depth = radius_depth + _depth_for_power(_tighten(factor), multiplicities[n])
        _check_cap(new_depth, n + 1)
        radius_depths.append(radius_depth)
        depths.append(float(new_depth))
        targets.append(next_target)
        stated.append(delta * nu ** (1.0 - sum(2.0 ** -j for j in range(1, n + 1))))

        report = uniform_strong_separation_on_geodesic(
            [([d], [m]) for d, m in zip(depths, multiplicities[:n + 1])],
            tol=tol,
        )
        achieved.append(report.lower_bound)
        scanned.append(report.value)
        if report.value < next_target - tol:
            note = f"step {n + 1}: scanned value {report.value:.6g} below the target {next_target:.6g}"
            diagnostics.append(note)
            toolkit_logger.warning("build_uss %s", note)
        toolkit_logger.info(
            "build_uss step %d: depth %.6f, radius depth %.6f, value %.6f (target %.6f)",
            n + 1, new_depth, radius_depth, report.value, next_target,
        )

    return ConstructionTrace(
        multiplicities=tuple(multiplicities[:n_max]),
        points=tuple(float(point_at_depth(d)) for d in depths),
        depths=tuple(depths),
        gaps=tuple(float(gap_at_depth(d)) for d in depths),
        radii=tuple(float(point_at_depth(d)) for d in radius_depths),
        radius_depths=tuple(radius_depths),
        achieved=tuple(achieved),
        scanned=tuple(scanned),
        targets=tuple(targets),
        stated_bounds=tuple(stated),
        target_delta=float(delta),
        nu=float(nu),
        diagnostics=tuple(diagnostics),
    )

# -----------------------------------------------------------
# Strongly but not uniformly separated sequences
# -----------------------------------------------------------
def _pair_budget(pair: int) -> float:
    """Cumulative slack exponent ``sum_{j=1}^{pair-1} 2^-(j+1)`` spent by the pairs after the first."""
    return sum(2.0 ** -(j + 1) for j in range(1, pair))


def build_counterexample(multiplicities: Sequence[int], nu: float, n_max: int) -> CounterexampleTrace:
    """
    ``n_max`` pairs ``(a_{2n-1}, a_{2n})`` with ``rho(a_{2n-1}, a_{2n})^{m_{2n}} = nu``.

    Each pair is pushed toward the circle until both new points keep a
    product at least ``2^-1/2`` over the earlier points, and every earlier
    point loses at most a factor ``2^(-2^-k)`` to pair ``k``; the strong
    separation of the whole sequence then stays above ``nu / 2``. The
    midpoint of pair ``n`` splits it at ``t_n = exp(-1/sqrt(m_{2n-1}))``.
    """
    multiplicities = list(multiplicities)
    message = first_error([
        validate_open_interval(nu, 0.0, 1.0, 'nu'),
        validate_multiplicities(multiplicities, strictly_increasing=True),
    ])
    if message:
        raise InputError(message)
    if n_max < 1 or len(multiplicities) < 2 * n_max:
        raise InputError(f"need n_max >= 1 and at least 2*n_max multiplicities, got n_max={n_max}, {len(multiplicities)} given")

    log_half_root = -0.5 * np.log(2.0)
    depths: List[float] = []
    budgets: List[float] = []
    for pair in range(1, n_max + 1):
        odd_m, even_m = multiplicities[2 * pair - 2], multiplicities[2 * pair - 1]
        offset = _depth_for_power(nu, even_m)
        earlier = list(depths)
        earlier_m = multiplicities[:len(earlier)]
        step = 2 * pair - 1

        if not earlier:
            odd_depth = float(depth_of(CONSTRUCTION_SETTINGS['first_point']))
        else:
            new_floor = np.log(_tighten(2.0 ** -0.5))
            loss_floor = np.log(_tighten(2.0 ** -(2.0 ** -pair)))

            def acceptable(s: float) -> bool:
                if _log_product(s, earlier, earlier_m) < new_floor:
                    return False
                if _log_product(s + offset, earlier, earlier_m) < new_floor:
                    return False
                earlier_depths = np.asarray(earlier, dtype=float)
                loss = odd_m * log_tanh(s - earlier_depths) + even_m * log_tanh(s + offset - earlier_depths)
                return bool(np.all(loss >= loss_floor))

            odd_depth = _search_depth(acceptable, earlier[-1], step)
        even_depth = odd_depth + offset
        _check_cap(even_depth, 2 * pair)
        depths.extend([float(odd_depth), float(even_depth)])
        budgets.append(_pair_budget(pair))

    midpoint_depths: List[float] = []
    pair_distances: List[float] = []
    t_values: List[float] = []
    s_values: List[float] = []
    s_direct: List[float] = []
    diagnostics: List[str] = []
    for pair in range(1, n_max + 1):
        odd_depth, even_depth = depths[2 * pair - 2], depths[2 * pair - 1]
        rho = float(depth_distance(odd_depth, even_depth))
        t = float(np.exp(-1.0 / np.sqrt(multiplicities[2 * pair - 2])))
        # split in the frame where the odd point sits at the origin
        gamma, s = rho_split(0.0, rho, t)
        midpoint_depth = odd_depth + float(depth_of(gamma))
        direct = float(depth_distance(midpoint_depth, even_depth)) / rho
        if abs(direct - s) > 1e-10:
            note = f"pair {pair}: split ratio {s:.12g} disagrees with direct {direct:.12g}"
            diagnostics.append(note)
            toolkit_logger.warning("build_counterexample %s", note)
        midpoint_depths.append(midpoint_depth)
        pair_distances.append(rho)
        t_values.append(t)
        s_values.append(float(s))
        s_direct.append(direct)

    toolkit_logger.info("build_counterexample: %d pairs, deepest point at depth %.6f", n_max, depths[-1])
    return CounterexampleTrace(
        multiplicities=tuple(multiplicities[:2 * n_max]),
        points=tuple(float(point_at_depth(d)) for d in depths),
        depths=tuple(depths),
        gaps=tuple(float(gap_at_depth(d)) for d in depths),
        midpoints=tuple(float(point_at_depth(d)) for d in midpoint_depths),
        midpoint_depths=tuple(midpoint_depths),
        pair_distances=tuple(pair_distances),
        t_values=tuple(t_values),
        s_values=tuple(s_values),
        s_direct=tuple(s_direct),
        budgets=tuple(budgets),
        nu=float(nu),
        diagnostics=tuple(diagnostics),
    )


def _strictly(values: Sequence[float], decreasing: bool) -> bool:
    pairs = zip(values[:-1], values[1:])
    return all(b < a for a, b in pairs) if decreasing else all(b > a for a, b in pairs)


def counterexample_diagnostics(trace: CounterexampleTrace, tol: Optional[float] = None) -> pd.DataFrame:
    """
    One row per pair: ``t``, ``t^m``, ``s``, ``s^m``, the leave-one-out
    product of the whole sequence at the midpoint, the strong separation and
    the uniform strong separation of the prefix of ``2n`` points, and the
    ratio ``m_{2n} eps_n / gamma_n``.

    Expected trends are reported in ``frame.attrs['checks']``; a failed
    trend is logged, never raised.
    """
    tol = SCAN_SETTINGS['tol'] if tol is None else float(tol)
    depths = np.asarray(trace.depths, dtype=float)
    multiplicities = np.asarray(trace.multiplicities, dtype=float)
    rows = []
    for index in range(trace.pairs):
        pair = index + 1
        odd_m, even_m = trace.multiplicities[2 * index], trace.multiplicities[2 * index + 1]
        t, s, rho = trace.t_values[index], trace.s_values[index], trace.pair_distances[index]
        logs = multiplicities * log_tanh(np.abs(trace.midpoint_depths[index] - depths))
        leave_one_out = float(np.exp(logs.sum() - logs.min()))
        prefix = slice(0, 2 * pair)
        uniform = uniform_strong_separation_on_geodesic(
            [([d], [m]) for d, m in zip(depths[prefix], multiplicities[prefix])],
            tol=tol,
        )
        rows.append({
            'n': pair,
            't': t,
            't^m': t ** odd_m,
            's': s,
            's^m': s ** even_m,
            'leaveoneout_at_xi': leave_one_out,
            'strong_separation': strong_separation_on_geodesic(depths[prefix], multiplicities[prefix]),
            'uniform_separation': uniform.value,
            'ratio': even_m * (1.0 - rho ** 2) / (1.0 - t),
        })
    frame = pd.DataFrame(rows, columns=[
        'n', 't', 't^m', 's', 's^m', 'leaveoneout_at_xi',
        'strong_separation', 'uniform_separation', 'ratio',
    ])
    checks: Dict[str, bool] = {}
    if len(frame) > 1:
        checks = {
            't^m_decreasing': _strictly(frame['t^m'].tolist(), decreasing=True),
            's^m_decreasing': _strictly(frame['s^m'].tolist(), decreasing=True),
            'ratio_increasing': _strictly(frame['ratio'].tolist()[1:], decreasing=False),
            'strong_separation_floor': bool(frame['strong_separation'].min() >= trace.nu / 2.0),
        }
        for name, ok in checks.items():
            if not ok:
                toolkit_logger.warning("counterexample diagnostics: expected trend '%s' does not hold", name)
    frame.attrs['checks'] = checks
    return frame
