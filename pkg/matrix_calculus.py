"""
Holomorphic functional calculus for matrices with spectrum in the disk.

A matrix is carried by its spectral data (distinct eigenvalues with the size
of their largest Jordan block). f(A) only depends on the jets of f at the
eigenvalues, so ``apply_function`` assembles upper-triangular Toeplitz blocks
from jets. ``apply_power_series`` is the independent dense route with a
certified truncation of the series.
"""

# Standard library imports
from dataclasses import dataclass
from math import comb
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

# Third-party imports
import numpy as np
import scipy.linalg as spla

# Local imports
from config import BOUNDARY_GUARD, NUMERIC_SETTINGS
from hyperbolic import (
    DiskPoint,
    FiniteBlaschke,
    Jet,
    PointLike,
    as_disk_point,
    evaluate_jet,
    pseudo_distance,
)
from lib.utils import (
    BoundaryGuardError,
    InputError,
    NumericalDiagnostic,
    complex_to_json,
    parse_complex,
    toolkit_logger,
)

__all__ = [
    'DenseMatrix',
    'Jet',
    'JetProvider',
    'SpectralData',
    'apply_function',
    'apply_power_series',
    'blaschke_jets',
    'blaschke_of_matrix',
    'constant_jets',
    'ingest_dense',
    'jordan_apply',
    'jordan_form',
    'load_sequence',
    'minimal_polynomial',
    'polynomial_jets',
    'product_jets',
    'sequence_to_payload',
]

JetProvider = Callable[[complex, int], Jet]

# -----------------------------------------------------------
# Matrix representations
# -----------------------------------------------------------
@dataclass(frozen=True)
class SpectralData:
    """Distinct eigenvalues with their orders (largest Jordan block size)."""

    entries: Tuple[Tuple[DiskPoint, int], ...]
    label: str = ''
    diagnostics: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        normalized: List[Tuple[DiskPoint, int]] = []
        for point, order in self.entries:
            if isinstance(order, bool) or int(order) != order or int(order) < 1:
                raise InputError(f"matrix '{self.label}': order {order!r} must be a positive integer")
            normalized.append((as_disk_point(point), int(order)))
        if not normalized:
            raise InputError(f"matrix '{self.label}': needs at least one eigenvalue")
        tol = NUMERIC_SETTINGS['distinct_tol']
        for i in range(len(normalized)):
            for j in range(i + 1, len(normalized)):
                if pseudo_distance(normalized[i][0], normalized[j][0]) <= tol:
                    raise InputError(
                        f"matrix '{self.label}': eigenvalues {normalized[i][0].value} and "
                        f"{normalized[j][0].value} are not distinct"
                    )
        object.__setattr__(self, 'entries', tuple(normalized))
        object.__setattr__(self, 'diagnostics', tuple(self.diagnostics))

    @classmethod
    def from_pairs(cls, pairs: Sequence[Tuple[PointLike, int]], label: str = '') -> 'SpectralData':
        return cls(tuple((point, order) for point, order in pairs), label)

    @property
    def reliable(self) -> bool:
        return not self.diagnostics

    @property
    def degree(self) -> int:
        return sum(order for _, order in self.entries)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([point.value for point, _ in self.entries], dtype=complex)

    @property
    def orders(self) -> List[int]:
        return [order for _, order in self.entries]


@dataclass(frozen=True, eq=False)
class DenseMatrix:
    entries: np.ndarray

    def __post_init__(self) -> None:
        array = np.array(self.entries, dtype=complex)
        if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] == 0:
            raise InputError(f"expected a nonempty square matrix, got shape {array.shape}")
        array.setflags(write=False)
        object.__setattr__(self, 'entries', array)

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(spla.eigvals(self.entries))))


def _as_array(M: Any) -> np.ndarray:
    return M.entries if isinstance(M, DenseMatrix) else np.asarray(M, dtype=complex)

# -----------------------------------------------------------
# Jet providers
# -----------------------------------------------------------
def polynomial_jets(coefficients: Sequence[complex]) -> JetProvider:
    """Jets of the polynomial with ascending ``coefficients``."""
    polynomial = np.polynomial.Polynomial(np.asarray(coefficients, dtype=complex))

    def provider(node: complex, length: int) -> Jet:
        values = []
        current = polynomial
        factorial = 1.0
        for k in range(length):
            values.append(complex(current(complex(node))) / factorial)
            current = current.deriv()
            factorial *= k + 1
        return Jet(node, tuple(values))

    return provider


def blaschke_jets(B: FiniteBlaschke) -> JetProvider:
    def provider(node: complex, length: int) -> Jet:
        return evaluate_jet(B, node, length - 1)

    return provider


def constant_jets(value: complex) -> JetProvider:
    def provider(node: complex, length: int) -> Jet:
        return Jet.constant(node, value, length)

    return provider


def product_jets(*providers: JetProvider) -> JetProvider:
    def provider(node: complex, length: int) -> Jet:
        result = Jet.constant(node, 1.0, length)
        for factor in providers:
            result = result * factor(node, length)
        return result

    return provider

# -----------------------------------------------------------
# Jordan blocks and block assembly
# -----------------------------------------------------------
def jordan_apply(jet: Jet) -> DenseMatrix:
    """f(J) for the Jordan block J of size ``jet.length``: upper-triangular Toeplitz."""
    first_row = jet.as_array()
    first_column = np.zeros_like(first_row)
    first_column[0] = first_row[0]
    return DenseMatrix(spla.toeplitz(first_column, first_row))


def apply_function(f: JetProvider, A: SpectralData) -> DenseMatrix:
    blocks = []
    for point, order in A.entries:
        try:
            jet = f(point.value, order)
        except Exception as exc:
            raise InputError(
                f"jet provider failed at {point.value} (order {order}) of matrix '{A.label}': {exc}"
            ) from exc
        if not isinstance(jet, Jet) or jet.length < order:
            raise InputError(
                f"jet provider returned {jet!r} at {point.value} of matrix '{A.label}', "
                f"expected a jet of length {order}"
            )
        blocks.append(jordan_apply(jet.truncate(order)).entries)
    return DenseMatrix(spla.block_diag(*blocks))


def jordan_form(A: SpectralData) -> DenseMatrix:
    """Block-diagonal Jordan matrix with one block per entry."""
    return apply_function(polynomial_jets([0.0, 1.0]), A)

# -----------------------------------------------------------
# Blaschke factor of a matrix
# -----------------------------------------------------------
def minimal_polynomial(A: SpectralData) -> List[complex]:
    """Ascending coefficients of ``prod (z - lambda)^m``."""
    roots: List[complex] = []
    for point, order in A.entries:
        roots.extend([point.value] * order)
    return [complex(c) for c in np.polynomial.polynomial.polyfromroots(roots)]


def blaschke_of_matrix(A: SpectralData) -> FiniteBlaschke:
    return FiniteBlaschke(tuple(A.entries))

# -----------------------------------------------------------
# Power series route
# -----------------------------------------------------------
def _power_envelope(n: int, radius: float, nilpotent_norm: float, dimension: int) -> float:
    """Bound on ``||T^n||`` for ``T = D + N`` upper triangular with ``||D|| <= radius``."""
    total = 0.0
    for j in range(min(dimension - 1, n) + 1):
        total += comb(n, j) * radius ** (n - j) * nilpotent_norm ** j
    return total


def apply_power_series(coefficients: Sequence[complex], M: Any, tol: float) -> DenseMatrix:
    """
    ``sum a_n M^n`` truncated once the certified tail drops below ``tol``.

    The tail bound comes from the complex Schur form ``T = D + N``: every word
    with at least ``d`` factors of ``N`` vanishes, hence
    ``||M^n|| <= sum_{j<d} C(n, j) r^(n-j) ||N||^j`` with ``r`` the spectral
    radius plus ``series_margin``. Beyond index ``N`` the envelope decays at
    least geometrically with ratio ``r (N + 2) / (N + 3 - d)``.
    """
    matrix = _as_array(M)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InputError("apply_power_series needs a square matrix")
    if tol <= 0:
        raise InputError(f"tolerance {tol} must be positive")
    dimension = matrix.shape[0]
    a = np.asarray(coefficients, dtype=complex)
    result = np.zeros_like(matrix)
    if a.size == 0:
        return DenseMatrix(result)

    schur_form, _ = spla.schur(matrix, output='complex')
    rho = float(np.max(np.abs(np.diag(schur_form))))
    if rho >= 1.0 - BOUNDARY_GUARD:
        raise BoundaryGuardError(f"spectral radius {rho} is not below 1 - {BOUNDARY_GUARD:g}")
    radius = rho + NUMERIC_SETTINGS['series_margin']
    if radius >= 1.0:
        radius = 0.5 * (1.0 + rho)
    nilpotent_norm = float(np.linalg.norm(np.triu(schur_form, 1), 2))
    suffix_sup = np.maximum.accumulate(np.abs(a)[::-1])[::-1]
    max_terms = NUMERIC_SETTINGS['series_max_terms']

    power = np.eye(dimension, dtype=complex)
    for n in range(a.size):
        if n >= max_terms:
            raise NumericalDiagnostic(f"series tail above {tol:g} after {max_terms} terms")
        result = result + a[n] * power
        if n + 1 >= a.size or suffix_sup[n + 1] == 0.0:
            break
        if n >= dimension - 2:
            ratio = radius * (n + 2) / (n + 3 - dimension)
            if ratio < 1.0:
                tail = suffix_sup[n + 1] * _power_envelope(n + 1, radius, nilpotent_norm, dimension) / (1.0 - ratio)
                if tail < tol:
                    toolkit_logger.debug("power series truncated after %d terms (tail %.3e)", n + 1, tail)
                    break
        power = power @ matrix
    return DenseMatrix(result)

# -----------------------------------------------------------
# Dense ingestion
# -----------------------------------------------------------
def _cluster_eigenvalues(eigenvalues: np.ndarray, cluster_tol: float) -> List[np.ndarray]:
    ordered = sorted(eigenvalues.tolist(), key=lambda value: (round(value.real, 12), round(value.imag, 12)))
    clusters: List[List[complex]] = []
    for value in ordered:
        joined = [cluster for cluster in clusters if min(abs(value - member) for member in cluster) <= cluster_tol]
        if not joined:
            clusters.append([value])
            continue
        merged = [value]
        for cluster in joined:
            merged.extend(cluster)
            clusters.remove(cluster)
        clusters.append(merged)
    clusters.sort(key=lambda cluster: (np.mean(cluster).real, np.mean(cluster).imag))
    return [np.asarray(cluster, dtype=complex) for cluster in clusters]


def _numerical_rank(matrix: np.ndarray, threshold: float) -> int:
    singular_values = spla.svdvals(matrix)
    return int(np.sum(singular_values > threshold))


def ingest_dense(M: Any, cluster_tol: Optional[float] = None, label: str = 'dense') -> SpectralData:
    """
    Spectral data of a dense matrix by eigenvalue clustering and rank stationarity.

    The order of a cluster centred at ``lambda`` is the smallest ``k`` with
    ``rank (M - lambda I)^k == rank (M - lambda I)^(k+1)``. Clusters closer
    than ten times ``cluster_tol`` are reported in ``diagnostics`` and the
    result is flagged unreliable.
    """
    matrix = _as_array(M)
    if cluster_tol is None:
        cluster_tol = NUMERIC_SETTINGS['cluster_tol']
    dimension = matrix.shape[0]
    eigenvalues = spla.eigvals(matrix)
    rho = float(np.max(np.abs(eigenvalues)))
    if rho >= 1.0 - BOUNDARY_GUARD:
        raise BoundaryGuardError(f"matrix '{label}': spectral radius {rho} is not below 1 - {BOUNDARY_GUARD:g}")

    scale = max(float(np.linalg.norm(matrix, 2)), 1.0)
    threshold = cluster_tol * scale
    clusters = _cluster_eigenvalues(eigenvalues, cluster_tol)
    diagnostics: List[str] = []
    entries: List[Tuple[complex, int]] = []
    identity = np.eye(dimension, dtype=complex)
    for cluster in clusters:
        center = complex(np.mean(cluster))
        shifted = matrix - center * identity
        power = shifted.copy()
        previous_rank = _numerical_rank(power, threshold)
        order = dimension
        for k in range(1, dimension + 1):
            power = power @ shifted
            rank = _numerical_rank(power, threshold)
            if rank == previous_rank:
                order = k
                break
            previous_rank = rank
        if order > cluster.size:
            diagnostics.append(
                f"order {order} at {center:.6g} exceeds the cluster size {cluster.size}; clamped"
            )
            order = cluster.size
        entries.append((center, order))

    for i in range(len(entries)):
        for j in range(i + 1, len(entries)):
            gap = abs(entries[i][0] - entries[j][0])
            if gap < 10.0 * cluster_tol:
                diagnostics.append(
                    f"clusters at {entries[i][0]:.6g} and {entries[j][0]:.6g} are only {gap:.3e} apart"
                )
    for message in diagnostics:
        toolkit_logger.warning("ingest_dense '%s': %s", label, message)
    return SpectralData(tuple(entries), label, tuple(diagnostics))

# -----------------------------------------------------------
# JSON matrix sequences
# -----------------------------------------------------------
def _parse_matrix(item: Any, index: int) -> SpectralData:
    where = f"matrices[{index}]"
    if not isinstance(item, dict):
        raise InputError(f"{where}: expected an object, got {type(item).__name__}")
    label = str(item.get('label', f"A{index + 1}"))
    try:
        if 'eigenvalues' in item:
            raw_entries = item['eigenvalues']
            if not isinstance(raw_entries, list) or not raw_entries:
                raise InputError(f"{where}.eigenvalues: expected a nonempty list")
            entries = []
            for position, raw in enumerate(raw_entries):
                spot = f"{where}.eigenvalues[{position}]"
                value = parse_complex(raw, spot)
                order = raw.get('order', 1) if isinstance(raw, dict) else 1
                if isinstance(order, bool) or not isinstance(order, int) or order < 1:
                    raise InputError(f"{spot}.order: expected a positive integer, got {order!r}")
                entries.append((value, order))
            return SpectralData(tuple(entries), label)
        if 'dense' in item:
            rows = item['dense']
            if not isinstance(rows, list) or not rows or not all(isinstance(row, list) for row in rows):
                raise InputError(f"{where}.dense: expected a list of rows")
            values = [
                [parse_complex(raw, f"{where}.dense[{r}][{c}]") for c, raw in enumerate(row)]
                for r, row in enumerate(rows)
            ]
            return ingest_dense(DenseMatrix(np.array(values, dtype=complex)), label=label)
    except BoundaryGuardError as exc:
        raise BoundaryGuardError(f"matrix '{label}': {exc}") from exc
    raise InputError(f"{where}: needs either 'eigenvalues' or 'dense'")


def load_sequence(payload: Any) -> List[SpectralData]:
    """Read a matrix sequence from its JSON form (a list, or an object with ``matrices``)."""
    if isinstance(payload, dict) and 'matrices' in payload:
        payload = payload['matrices']
    if not isinstance(payload, list) or not payload:
        raise InputError("matrices: expected a nonempty list")
    return [_parse_matrix(item, index) for index, item in enumerate(payload)]


def sequence_to_payload(sequence: Sequence[SpectralData]) -> List[Dict[str, Any]]:
    payload = []
    for matrix in sequence:
        eigenvalues = []
        for point, order in matrix.entries:
            entry = complex_to_json(point.value)
            entry['order'] = order
            eigenvalues.append(entry)
        item: Dict[str, Any] = {'label': matrix.label, 'eigenvalues': eigenvalues}
        if matrix.diagnostics:
            item['diagnostics'] = list(matrix.diagnostics)
        payload.append(item)
    return payload
