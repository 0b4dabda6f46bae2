"""
Separation functionals of point sets and of families of Blaschke products.

Pointwise functionals (strong, weak, Nikolski, Carleson weights) are exact
finite computations. Uniform strong separation is an infimum over the disk;
it is estimated by a branch and bound scan whose cells carry a certified
lower bound, so every report comes with a bracket ``[lower_bound, value]``.
"""

# Standard library imports
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

# Third-party imports
import numpy as np
import pandas as pd
from scipy.optimize import brentq

# Local imports
from config import BOUNDARY_GUARD, SCAN_SETTINGS
from hyperbolic import (
    DiskPoint,
    FiniteBlaschke,
    PointLike,
    as_disk_point,
    blaschke_factor,
    log_tanh,
    pairwise_log_distances,
)
from lib.utils import InputError, toolkit_logger

PointEntry = Union[PointLike, Tuple[PointLike, int]]
DepthSet = Tuple[Sequence[float], Sequence[int]]

_CHUNK = 200_000

# -----------------------------------------------------------
# Report type
# -----------------------------------------------------------
@dataclass(frozen=True)
class SeparationReport:
    """
    Result of an infimum scan.

    ``value`` is attained at ``argmin_point``; the true infimum lies in
    ``[lower_bound, value]``. ``converged`` is False when the evaluation
    budget ran out before the bracket closed to the requested tolerance.
    """

    value: float
    argmin_point: complex
    certified_radius: float
    grid_evaluations: int
    lower_bound: float
    converged: bool
    method: str
    argmin_depth: Optional[float] = None
    diagnostics: Tuple[str, ...] = field(default_factory=tuple)

    def as_dict(self) -> Dict[str, Any]:
        return {
            'value': self.value,
            'lower_bound': self.lower_bound,
            'argmin_point': {'re': self.argmin_point.real, 'im': self.argmin_point.imag},
            'argmin_depth': self.argmin_depth,
            'certified_radius': self.certified_radius,
            'grid_evaluations': self.grid_evaluations,
            'converged': self.converged,
            'method': self.method,
            'diagnostics': list(self.diagnostics),
        }

# -----------------------------------------------------------
# Pointwise functionals
# -----------------------------------------------------------
def _split_entries(points: Sequence[PointEntry]) -> Tuple[np.ndarray, np.ndarray]:
    values: List[complex] = []
    multiplicities: List[int] = []
    for entry in points:
        if isinstance(entry, (tuple, list)) and len(entry) == 2:
            point, multiplicity = entry
        else:
            point, multiplicity = entry, 1
        if int(multiplicity) < 1:
            raise InputError(f"multiplicity {multiplicity!r} must be a positive integer")
        values.append(as_disk_point(point).value)
        multiplicities.append(int(multiplicity))
    return np.asarray(values, dtype=complex), np.asarray(multiplicities, dtype=float)


def _min_leave_one_out(log_distances: np.ndarray, exponents: np.ndarray, name: str) -> float:
    count = log_distances.shape[0]
    if count <= 1:
        return 1.0
    weighted = np.where(np.eye(count, dtype=bool), 0.0, exponents * log_distances)
    products = weighted.sum(axis=1)
    if np.any(np.isneginf(products)):
        toolkit_logger.warning("%s: repeated point in the input, value is 0", name)
        return 0.0
    return float(np.exp(products.min()))


def strong_separation(points: Sequence[PointEntry]) -> float:
    """``min_n prod_{k != n} rho(a_n, a_k)^{m_k}``."""
    values, multiplicities = _split_entries(points)
    logs = pairwise_log_distances(values, values)
    return _min_leave_one_out(logs, multiplicities[None, :], 'strong_separation')


def nikolski_pairwise(points: Sequence[PointEntry]) -> float:
    """``min_n prod_{k != n} rho(a_n, a_k)^{m_n m_k}``, reported raw."""
    values, multiplicities = _split_entries(points)
    logs = pairwise_log_distances(values, values)
    return _min_leave_one_out(logs, np.outer(multiplicities, multiplicities), 'nikolski_pairwise')


def strong_separation_on_geodesic(depths: Sequence[float], multiplicities: Optional[Sequence[int]] = None) -> float:
    """Strong separation of diameter points given by their depth ``artanh(x)``."""
    s = np.asarray(depths, dtype=float)
    m = np.ones(s.size) if multiplicities is None else np.asarray(multiplicities, dtype=float)
    logs = log_tanh(np.abs(s[:, None] - s[None, :]))
    return _min_leave_one_out(logs, m[None, :], 'strong_separation')


def weak_separation(points: Sequence[PointLike]) -> float:
    """``min_{n != k} rho(a_n, a_k)``."""
    values = np.asarray([as_disk_point(point).value for point in points], dtype=complex)
    if values.size < 2:
        raise InputError("weak_separation needs at least two points")
    logs = pairwise_log_distances(values, values)
    off_diagonal = logs[~np.eye(values.size, dtype=bool)]
    return float(np.exp(off_diagonal.min()))


def carleson_weights(points: Sequence[PointLike]) -> List[float]:
    """``1 - |a|^2``, the masses of the Carleson measure of the sequence."""
    return [1.0 - abs(as_disk_point(point).value) ** 2 for point in points]

# -----------------------------------------------------------
# Leave-one-out products of Blaschke families
# -----------------------------------------------------------
def _loo_max(logs: np.ndarray) -> np.ndarray:
    """``max_n sum_{k != n} logs[k]`` per column, i.e. total minus the smallest row."""
    if logs.shape[0] == 1:
        return np.zeros(logs.shape[1])
    smallest = np.argmin(logs, axis=0)
    trimmed = logs.copy()
    trimmed[smallest, np.arange(logs.shape[1])] = 0.0
    return trimmed.sum(axis=0)


def _factor_arrays(factors: Sequence[FiniteBlaschke]) -> List[Tuple[np.ndarray, np.ndarray]]:
    return [(factor.zero_values, factor.multiplicities) for factor in factors]


def _factor_logs(arrays: List[Tuple[np.ndarray, np.ndarray]], z: np.ndarray) -> np.ndarray:
    logs = np.zeros((len(arrays), z.size))
    for index, (zeros, multiplicities) in enumerate(arrays):
        if zeros.size:
            logs[index] = multiplicities @ pairwise_log_distances(zeros, z)
    return logs


def leave_one_out_product(factors: Sequence[FiniteBlaschke], z: Union[complex, np.ndarray]) -> np.ndarray:
    """``max_n prod_{k != n} |B_k(z)|`` at every point of ``z``."""
    points = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    arrays = _factor_arrays(factors)
    out = np.empty(points.size)
    for start in range(0, points.size, _CHUNK):
        chunk = points[start:start + _CHUNK]
        out[start:start + _CHUNK] = np.exp(_loo_max(_factor_logs(arrays, chunk)))
    return out

# -----------------------------------------------------------
# Geodesic reduction
# -----------------------------------------------------------
def _geodesic_frame(zeros: np.ndarray) -> Optional[Tuple[Optional[complex], complex]]:
    """
    Möbius frame ``w = u * b_a(z)`` sending every zero to the real diameter.

    Returns ``(None, 1)`` when the zeros are already real, ``None`` when they
    do not share a geodesic.
    """
    tol = SCAN_SETTINGS['collinear_tol']
    if zeros.size == 0 or np.all(np.abs(zeros.imag) <= tol):
        return None, 1.0 + 0j
    anchor = complex(zeros[0])
    images = blaschke_factor(anchor, zeros)
    farthest = images[np.argmax(np.abs(images))]
    if abs(farthest) <= tol:
        return anchor, 1.0 + 0j
    rotation = np.conj(farthest) / abs(farthest)
    if np.all(np.abs((rotation * images).imag) <= tol):
        return anchor, complex(rotation)
    return None


def _to_frame(frame: Tuple[Optional[complex], complex], z: np.ndarray) -> np.ndarray:
    anchor, rotation = frame
    if anchor is None:
        return np.asarray(z, dtype=complex)
    return rotation * blaschke_factor(anchor, z)


def _from_frame(frame: Tuple[Optional[complex], complex], w: complex) -> complex:
    anchor, rotation = frame
    if anchor is None:
        return complex(w)
    return complex(blaschke_factor(anchor, np.conj(rotation) * w))


def _depth_logs(depth_sets: List[Tuple[np.ndarray, np.ndarray]], s: np.ndarray) -> np.ndarray:
    logs = np.zeros((len(depth_sets), s.size))
    for index, (depths, multiplicities) in enumerate(depth_sets):
        if depths.size:
            logs[index] = multiplicities @ log_tanh(np.abs(depths[:, None] - s[None, :]))
    return logs


def _schwarz_pick_floor(moduli: np.ndarray, radius: np.ndarray) -> np.ndarray:
    """Least ``|f(w)|`` for a self-map of the disk with ``|f(c)| = moduli``, ``rho(w, c) <= radius``."""
    floor = (moduli - radius) / (1.0 - moduli * radius)
    return np.where(moduli > radius, floor, 0.0)


def _log_floor(values: np.ndarray) -> np.ndarray:
    with np.errstate(divide='ignore'):
        return np.log(values)


def uniform_strong_separation_on_geodesic(
    depth_sets: Sequence[DepthSet],
    tol: Optional[float] = None,
    budget: Optional[int] = None,
) -> SeparationReport:
    """
    Infimum over the disk of ``max_n prod_{k != n} |B_k(z)|`` for Blaschke
    products whose zeros all sit on the real diameter at the given depths.

    Projecting a point onto the diameter does not increase its distance to
    any point of the diameter, so the infimum is taken on the diameter, and
    outside the hull of the zeros every factor grows. Two factors with one
    zero each are solved exactly; otherwise a 1-D branch and bound runs in
    depth coordinates.
    """
    tol = SCAN_SETTINGS['tol'] if tol is None else float(tol)
    budget = SCAN_SETTINGS['budget'] if budget is None else int(budget)
    sets = [
        (np.asarray(depths, dtype=float), np.asarray(multiplicities, dtype=float))
        for depths, multiplicities in depth_sets
    ]
    if not sets:
        raise InputError("uniform strong separation needs at least one factor")
    all_depths = np.concatenate([depths for depths, _ in sets]) if any(d.size for d, _ in sets) else np.zeros(1)
    low, high = float(all_depths.min()), float(all_depths.max())
    edge_radius = float(np.tanh(max(abs(low), abs(high))))
    certified_radius = min(edge_radius, float(np.nextafter(1.0, 0.0)))

    def report(value: float, depth: float, lower: float, evaluations: int, converged: bool, method: str,
               diagnostics: Tuple[str, ...] = ()) -> SeparationReport:
        return SeparationReport(
            value=float(value),
            argmin_point=complex(np.tanh(depth)),
            certified_radius=certified_radius if certified_radius > 0 else 0.5,
            grid_evaluations=int(evaluations),
            lower_bound=float(max(0.0, min(lower, value))),
            converged=converged,
            method=method,
            argmin_depth=float(depth),
            diagnostics=diagnostics,
        )

    if len(sets) == 1:
        return report(1.0, low, 1.0, 0, True, 'trivial')

    if high - low == 0.0:
        value = float(np.exp(_loo_max(_depth_logs(sets, np.array([low])))[0]))
        return report(value, low, value, 1, True, 'geodesic')

    if len(sets) == 2 and all(depths.size == 1 for depths, _ in sets):
        (s1,), (s2,) = sets[0][0], sets[1][0]
        m1, m2 = float(sets[0][1][0]), float(sets[1][1][0])
        span = abs(s2 - s1)
        if span == 0.0:
            return report(0.0, s1, 0.0, 1, True, 'geodesic')

        def crossing(u: float) -> float:
            return m1 * float(log_tanh(u)) - m2 * float(log_tanh(span - u))

        u_star = brentq(crossing, span * 1e-15, span * (1.0 - 1e-15), xtol=1e-15 * max(1.0, span), rtol=1e-15)
        value = float(np.exp(m1 * log_tanh(u_star)))
        depth = s1 + np.sign(s2 - s1) * u_star
        return report(value, depth, value, 1, True, 'geodesic')

    cells = SCAN_SETTINGS['geodesic_cells']
    edges = np.linspace(low, high, cells + 1)
    left, right = edges[:-1], edges[1:]
    seeds = np.concatenate([all_depths, [low, high]])
    seed_values = np.exp(_loo_max(_depth_logs(sets, seeds)))
    best = int(np.argmin(seed_values))
    upper, best_depth = float(seed_values[best]), float(seeds[best])
    evaluations = seeds.size
    pruned_floor = np.inf
    converged = True

    while left.size:
        centers = 0.5 * (left + right)
        logs = _depth_logs(sets, centers)
        evaluations += centers.size
        values = np.exp(_loo_max(logs))
        index = int(np.argmin(values))
        if values[index] < upper:
            upper, best_depth = float(values[index]), float(centers[index])
        radius = np.tanh(0.5 * (right - left))
        floors = np.exp(_loo_max(_log_floor(_schwarz_pick_floor(np.exp(logs), radius[None, :]))))
        open_cells = floors < upper - tol
        if np.any(~open_cells):
            pruned_floor = min(pruned_floor, float(floors[~open_cells].min()))
        left, right = left[open_cells], right[open_cells]
        if left.size and evaluations + 2 * left.size > budget:
            pruned_floor = min(pruned_floor, float(floors[open_cells].min()))
            converged = False
            break
        middle = 0.5 * (left + right)
        left, right = np.concatenate([left, middle]), np.concatenate([middle, right])

    diagnostics: Tuple[str, ...] = ()
    if not converged:
        diagnostics = (f"evaluation budget {budget} exhausted before the bracket closed to {tol:g}",)
        toolkit_logger.warning("geodesic separation scan: %s", diagnostics[0])
    return report(upper, best_depth, min(pruned_floor, upper), evaluations, converged, 'geodesic', diagnostics)

# -----------------------------------------------------------
# Polar scan
# -----------------------------------------------------------
def _annulus_floor_logs(arrays: List[Tuple[np.ndarray, np.ndarray]], inner: np.ndarray) -> np.ndarray:
    """``log prod ((r - |a|) / (1 - |a| r))^m`` where every zero sits inside radius ``r``, else ``-inf``."""
    logs = np.full((len(arrays), inner.size), 0.0)
    for index, (zeros, multiplicities) in enumerate(arrays):
        if not zeros.size:
            continue
        moduli = np.abs(zeros)[:, None]
        ratio = (inner[None, :] - moduli) / (1.0 - moduli * inner[None, :])
        with np.errstate(divide='ignore', invalid='ignore'):
            term = multiplicities @ np.log(np.where(ratio > 0.0, ratio, 0.0))
        logs[index] = term
    return logs


def _cell_radius(s0: np.ndarray, s1: np.ndarray, t0: np.ndarray, t1: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    radial = np.tanh(0.5 * (s1 - s0))
    outer = np.tanh(s1)
    half_angle = np.minimum(0.5 * (t1 - t0), np.pi)
    chord = outer * np.abs(1.0 - np.exp(1j * half_angle)) / np.abs(1.0 - outer ** 2 * np.exp(1j * half_angle))
    total = (radial + chord) / (1.0 + radial * chord)
    return total, radial, chord


def _cell_centers(s0: np.ndarray, s1: np.ndarray, t0: np.ndarray, t1: np.ndarray) -> np.ndarray:
    return np.tanh(0.5 * (s0 + s1)) * np.exp(0.5j * (t0 + t1))


def _evaluate(arrays: List[Tuple[np.ndarray, np.ndarray]], z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    logs = np.empty((len(arrays), z.size))
    for start in range(0, z.size, _CHUNK):
        logs[:, start:start + _CHUNK] = _factor_logs(arrays, z[start:start + _CHUNK])
    return logs, np.exp(_loo_max(logs))


def _polar_scan(factors: Sequence[FiniteBlaschke], tol: float, budget: int, refine_depth: int) -> SeparationReport:
    arrays = _factor_arrays(factors)
    zeros = np.concatenate([factor.zero_values for factor in factors])
    outermost = float(np.max(np.abs(zeros))) if zeros.size else 0.0
    ceiling = 1.0 - BOUNDARY_GUARD

    seeds = np.concatenate([zeros, [0j]])
    _, seed_values = _evaluate(arrays, seeds)
    evaluations = seeds.size
    best = int(np.argmin(seed_values))
    upper, best_point = float(seed_values[best]), complex(seeds[best])
    if upper == 0.0:
        return SeparationReport(0.0, best_point, 0.5 * (1.0 + outermost), evaluations, 0.0, True, 'polar')

    def annulus_value(r: float) -> float:
        return float(np.exp(_loo_max(_annulus_floor_logs(arrays, np.array([r]))))[0])

    diagnostics: List[str] = []
    if annulus_value(ceiling) < upper:
        radius = ceiling
        diagnostics.append("annulus bound never exceeds the interior minimum; scan reaches the boundary guard")
    else:
        low, high = outermost, ceiling
        for _ in range(200):
            middle = 0.5 * (low + high)
            if annulus_value(middle) >= upper:
                high = middle
            else:
                low = middle
            if high - low <= 1e-15:
                break
        radius = high

    depth = float(np.arctanh(radius))
    radial_edges = np.linspace(0.0, depth, SCAN_SETTINGS['radial'] + 1)
    angular_edges = np.linspace(0.0, 2.0 * np.pi, SCAN_SETTINGS['angular'] + 1)
    S0, T0 = np.meshgrid(radial_edges[:-1], angular_edges[:-1], indexing='ij')
    S1, T1 = np.meshgrid(radial_edges[1:], angular_edges[1:], indexing='ij')
    s0, s1, t0, t1 = S0.ravel(), S1.ravel(), T0.ravel(), T1.ravel()

    centers = _cell_centers(s0, s1, t0, t1)
    logs, values = _evaluate(arrays, centers)
    evaluations += centers.size
    index = int(np.argmin(values))
    if values[index] < upper:
        upper, best_point = float(values[index]), complex(centers[index])

    # zoom into the most promising coarse cells
    order = np.argsort(values, kind='stable')[:SCAN_SETTINGS['refine_cells']]
    for cell in order:
        a0, a1, b0, b1 = s0[cell], s1[cell], t0[cell], t1[cell]
        for _ in range(refine_depth):
            am, bm = 0.5 * (a0 + a1), 0.5 * (b0 + b1)
            quads = np.array([[a0, am, b0, bm], [a0, am, bm, b1], [am, a1, b0, bm], [am, a1, bm, b1]])
            points = _cell_centers(quads[:, 0], quads[:, 1], quads[:, 2], quads[:, 3])
            _, quad_values = _evaluate(arrays, points)
            evaluations += 4
            pick = int(np.argmin(quad_values))
            if quad_values[pick] < upper:
                upper, best_point = float(quad_values[pick]), complex(points[pick])
            a0, a1, b0, b1 = quads[pick]

    pruned_floor = np.inf
    converged = True
    while s0.size:
        distance, radial, chord = _cell_radius(s0, s1, t0, t1)
        moduli = np.exp(logs)
        factor_floor = _log_floor(_schwarz_pick_floor(moduli, distance[None, :]))
        factor_floor = np.maximum(factor_floor, _annulus_floor_logs(arrays, np.tanh(s0)))
        floors = np.exp(_loo_max(factor_floor))
        open_cells = floors < upper - tol
        if np.any(~open_cells):
            pruned_floor = min(pruned_floor, float(floors[~open_cells].min()))
        if not np.any(open_cells):
            break
        if evaluations + 2 * int(open_cells.sum()) > budget:
            pruned_floor = min(pruned_floor, float(floors[open_cells].min()))
            converged = False
            break
        s0, s1, t0, t1 = s0[open_cells], s1[open_cells], t0[open_cells], t1[open_cells]
        split_radially = radial[open_cells] >= chord[open_cells]
        sm = np.where(split_radially, 0.5 * (s0 + s1), s1)
        tm = np.where(split_radially, t1, 0.5 * (t0 + t1))
        first = (s0, sm, t0, tm)
        second = (np.where(split_radially, sm, s0), s1, np.where(split_radially, t0, tm), t1)
        s0, s1, t0, t1 = (np.concatenate([a, b]) for a, b in zip(first, second))
        centers = _cell_centers(s0, s1, t0, t1)
        logs, values = _evaluate(arrays, centers)
        evaluations += centers.size
        index = int(np.argmin(values))
        if values[index] < upper:
            upper, best_point = float(values[index]), complex(centers[index])

    if not converged:
        diagnostics.append(f"evaluation budget {budget} exhausted before the bracket closed to {tol:g}")
        toolkit_logger.warning("polar separation scan: %s", diagnostics[-1])
    return SeparationReport(
        value=upper,
        argmin_point=best_point,
        certified_radius=float(radius),
        grid_evaluations=int(evaluations),
        lower_bound=float(max(0.0, min(pruned_floor, upper))),
        converged=converged,
        method='polar',
        diagnostics=tuple(diagnostics),
    )


def uniform_strong_separation(
    factors: Sequence[FiniteBlaschke],
    tol: Optional[float] = None,
    grid_depth: Optional[int] = None,
    budget: Optional[int] = None,
) -> SeparationReport:
    """
    ``inf_z max_n prod_{k != n} |B_k(z)|`` with absolute error at most ``tol``.

    Zeros on a common geodesic go through the exact 1-D reduction (after a
    Möbius normalization when the geodesic is not the real diameter);
    everything else goes through the polar branch and bound.
    """
    factors = list(factors)
    if not factors:
        raise InputError("uniform strong separation needs at least one factor")
    tol = SCAN_SETTINGS['tol'] if tol is None else float(tol)
    budget = SCAN_SETTINGS['budget'] if budget is None else int(budget)
    refine_depth = SCAN_SETTINGS['refine_depth'] if grid_depth is None else int(grid_depth)
    if tol <= 0:
        raise InputError(f"tolerance {tol} must be positive")

    if len(factors) == 1:
        return SeparationReport(1.0, 0j, 1.0 - BOUNDARY_GUARD, 0, 1.0, True, 'trivial')

    zeros = np.concatenate([factor.zero_values for factor in factors])
    frame = _geodesic_frame(zeros)
    if frame is None:
        return _polar_scan(factors, tol, budget, refine_depth)

    depth_sets = []
    for factor in factors:
        images = _to_frame(frame, factor.zero_values).real if factor.degree else np.zeros(0)
        depth_sets.append((np.arctanh(np.clip(images, -1.0 + 1e-16, 1.0 - 1e-16)), factor.multiplicities))
    geodesic = uniform_strong_separation_on_geodesic(depth_sets, tol, budget)
    point = _from_frame(frame, np.tanh(geodesic.argmin_depth))
    # the projection argument certifies the whole disk; report the hull of the zeros
    outermost = float(np.max(np.abs(zeros))) if zeros.size else 0.0
    return SeparationReport(
        value=geodesic.value,
        argmin_point=point,
        certified_radius=outermost if outermost > 0.0 else 0.5,
        grid_evaluations=geodesic.grid_evaluations,
        lower_bound=geodesic.lower_bound,
        converged=geodesic.converged,
        method=geodesic.method,
        argmin_depth=geodesic.argmin_depth,
        diagnostics=geodesic.diagnostics,
    )

# -----------------------------------------------------------
# Landscape export
# -----------------------------------------------------------
def landscape(
    factors: Sequence[FiniteBlaschke],
    radial: Optional[int] = None,
    angular: Optional[int] = None,
    radius: Optional[float] = None,
) -> pd.DataFrame:
    """Leave-one-out product on a hyperbolic polar grid, as rows ``(re, im, value)``."""
    radial = SCAN_SETTINGS['radial'] if radial is None else int(radial)
    angular = SCAN_SETTINGS['angular'] if angular is None else int(angular)
    if radius is None:
        zeros = np.concatenate([factor.zero_values for factor in factors]) if factors else np.zeros(0)
        outermost = float(np.max(np.abs(zeros))) if zeros.size else 0.0
        radius = max(0.99, 0.5 * (1.0 + outermost))
    depths = np.linspace(0.0, np.arctanh(radius), radial + 1)[1:]
    angles = np.linspace(0.0, 2.0 * np.pi, angular, endpoint=False)
    grid = (np.tanh(depths)[:, None] * np.exp(1j * angles)[None, :]).ravel()
    grid = np.concatenate([[0j], grid])
    values = leave_one_out_product(factors, grid)
    return pd.DataFrame({'re': grid.real, 'im': grid.imag, 'value': values})
