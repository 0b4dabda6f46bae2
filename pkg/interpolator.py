"""
Finite generalized interpolation on the disk.

A matrix problem ``phi(A_n) = phi_n(A_n)`` reduces to Hermite data on the
eigenvalues: at each eigenvalue of order ``m`` the interpolant must match
``m`` Taylor coefficients of the target. The minimal ``H^inf`` norm is the
norm of the compression of multiplication by any Hermite representative to
the model space of the data's Blaschke product; the extremal interpolant is
read off a maximal vector of that compression.
"""

# Standard library imports
from dataclasses import dataclass, field
from math import comb, factorial
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

# Third-party imports
import numpy as np
import pandas as pd
import scipy.linalg as spla

# Local imports
from config import NUMERIC_SETTINGS, RUN_DEFAULTS, SCAN_SETTINGS, SOLVER_SETTINGS
from hyperbolic import DiskPoint, FiniteBlaschke, Jet, as_disk_point, pseudo_distance
from lib.utils import (
    ConditioningError,
    InputError,
    complex_to_json,
    parse_complex,
    toolkit_logger,
)
from matrix_calculus import (
    JetProvider,
    SpectralData,
    blaschke_jets,
    blaschke_of_matrix,
    constant_jets,
    load_sequence,
    polynomial_jets,
)
from model_space import KernelBasis, ModelVector, model_basis
from separation import uniform_strong_separation

# -----------------------------------------------------------
# Hermite data
# -----------------------------------------------------------
@dataclass(frozen=True)
class HermiteData:
    """Nodes with the number of Taylor coefficients to match and the target jet."""

    nodes: Tuple[Tuple[DiskPoint, int, Jet], ...]

    def __post_init__(self) -> None:
        normalized = []
        for point, order, jet in self.nodes:
            point = as_disk_point(point)
            if isinstance(order, bool) or int(order) != order or int(order) < 1:
                raise InputError(f"node {point.value}: order {order!r} must be a positive integer")
            order = int(order)
            if not isinstance(jet, Jet) or jet.length < order:
                raise InputError(f"node {point.value}: expected a target jet of length {order}")
            normalized.append((point, order, Jet(point.value, jet.coefficients[:order])))
        if not normalized:
            raise InputError("Hermite data needs at least one node")
        tol = NUMERIC_SETTINGS['distinct_tol']
        for a in range(len(normalized)):
            for b in range(a + 1, len(normalized)):
                if pseudo_distance(normalized[a][0], normalized[b][0]) <= tol:
                    raise InputError(f"nodes {normalized[a][0].value} and {normalized[b][0].value} coincide")
        object.__setattr__(self, 'nodes', tuple(normalized))

    @classmethod
    def from_values(cls, entries: Sequence[Tuple[complex, Sequence[complex]]]) -> 'HermiteData':
        """Build from ``(node, [c0, c1, ...])`` pairs; the order is the jet length."""
        return cls(tuple(
            (node, len(coefficients), Jet(complex(node), tuple(coefficients)))
            for node, coefficients in entries
        ))

    @property
    def total_degree(self) -> int:
        return sum(order for _, order, _ in self.nodes)

    @property
    def blaschke(self) -> FiniteBlaschke:
        return FiniteBlaschke(tuple((point, order) for point, order, _ in self.nodes))

    def jet_provider(self) -> JetProvider:
        """Provider returning the stored target jets; only defined at the data's nodes."""
        table = {point.value: jet for point, _, jet in self.nodes}

        def provider(node: complex, length: int) -> Jet:
            jet = table.get(complex(node))
            if jet is None:
                raise InputError(f"no target jet stored at {node}")
            if jet.length < length:
                raise InputError(f"target at {node} has {jet.length} coefficients, {length} requested")
            return jet.truncate(length)

        return provider

    def scaled(self, factor: complex) -> 'HermiteData':
        return HermiteData(tuple((point, order, jet.scale(factor)) for point, order, jet in self.nodes))

    def as_dict(self) -> List[Dict[str, Any]]:
        return [
            dict(complex_to_json(point.value), order=order, jet=[complex_to_json(c) for c in jet.coefficients])
            for point, order, jet in self.nodes
        ]


def hermite_data_from_matrices(sequence: Sequence[SpectralData], targets: Sequence[JetProvider]) -> HermiteData:
    """
    Flatten a matrix problem into Hermite data on the eigenvalues.

    An eigenvalue shared by several matrices is kept once at the largest
    order; the targets must agree there on every common coefficient.
    """
    sequence = list(sequence)
    targets = list(targets)
    if len(sequence) != len(targets):
        raise InputError(f"{len(sequence)} matrices but {len(targets)} targets")
    jet_tol = SOLVER_SETTINGS['jet_tol']
    distinct_tol = NUMERIC_SETTINGS['distinct_tol']
    merged: List[List[Any]] = []
    for matrix, target in zip(sequence, targets):
        for point, order in matrix.entries:
            try:
                jet = target(point.value, order)
            except InputError:
                raise
            except Exception as exc:
                raise InputError(f"target of matrix '{matrix.label}' failed at {point.value}: {exc}") from exc
            if not isinstance(jet, Jet) or jet.length < order:
                raise InputError(f"target of matrix '{matrix.label}' returned a short jet at {point.value}")
            jet = jet.truncate(order)
            for slot in merged:
                if pseudo_distance(slot[0], point) <= distinct_tol:
                    common = min(slot[1], order)
                    existing = slot[2].as_array()[:common]
                    incoming = jet.as_array()[:common]
                    scale = 1.0 + float(np.max(np.abs(existing)))
                    if float(np.max(np.abs(existing - incoming))) > jet_tol * scale:
                        raise InputError(
                            f"conflicting targets at shared eigenvalue {slot[0].value} "
                            f"(matrix '{matrix.label}')"
                        )
                    if order > slot[1]:
                        slot[1] = order
                        slot[2] = Jet(slot[0].value, jet.coefficients)
                    break
            else:
                merged.append([point, order, jet])
    return HermiteData(tuple((point, order, jet) for point, order, jet in merged))


def hermite_polynomial(data: HermiteData) -> List[complex]:
    """
    Ascending coefficients of the Hermite interpolation polynomial.

    Newton form on the node list with repetitions; confluent divided
    differences are the stored Taylor coefficients.
    """
    min_gap = NUMERIC_SETTINGS['node_min_gap']
    values = [point.value for point, _, _ in data.nodes]
    for a in range(len(values)):
        for b in range(a + 1, len(values)):
            if abs(values[a] - values[b]) < min_gap:
                raise ConditioningError(f"nodes {values[a]} and {values[b]} are closer than {min_gap:g}")

    points: List[complex] = []
    groups: List[int] = []
    for group, (point, order, _) in enumerate(data.nodes):
        points.extend([point.value] * order)
        groups.extend([group] * order)
    jets = [jet.as_array() for _, _, jet in data.nodes]

    size = len(points)
    table = np.zeros((size, size), dtype=complex)
    for i in range(size):
        table[i, 0] = jets[groups[i]][0]
    for k in range(1, size):
        for i in range(size - k):
            if groups[i] == groups[i + k]:
                table[i, k] = jets[groups[i]][k]
            else:
                table[i, k] = (table[i + 1, k - 1] - table[i, k - 1]) / (points[i + k] - points[i])

    coefficients = np.array([table[0, size - 1]], dtype=complex)
    for k in range(size - 2, -1, -1):
        coefficients = np.polynomial.polynomial.polymul(coefficients, [-points[k], 1.0])
        coefficients[0] += table[0, k]
    return [complex(c) for c in coefficients]

# -----------------------------------------------------------
# Compression to the model space
# -----------------------------------------------------------
def compressed_operator(psi: Union[Sequence[complex], JetProvider], basis: KernelBasis) -> np.ndarray:
    """
    Matrix of the adjoint of ``P_K M_psi |K`` in the kernel basis of ``K = H^2 ⊖ B H^2``.

    The adjoint sends ``k_λ^(j)`` to ``sum_{i<=j} C(j, i) conj(psi^(i)(λ)) k_λ^(j-i)``,
    so it depends only on the jets of ``psi`` at the zeros of ``B``.
    """
    if basis.source is None:
        raise InputError("compressed_operator needs a basis built from a Blaschke product")
    provider = psi if callable(psi) else polynomial_jets(list(psi))
    position = {atom: index for index, atom in enumerate(basis.atoms)}
    matrix = np.zeros((basis.dimension, basis.dimension), dtype=complex)
    for point, multiplicity in basis.source.zeros:
        derivatives = provider(point.value, multiplicity).derivatives()
        for j in range(multiplicity):
            column = position[(point.value, j)]
            for i in range(j + 1):
                matrix[position[(point.value, j - i)], column] += comb(j, i) * np.conj(derivatives[i])
    return matrix


@dataclass(frozen=True, eq=False)
class _Compression:
    basis: KernelBasis
    adjoint: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _compress(data: HermiteData, provider: Optional[JetProvider] = None) -> _Compression:
    basis = model_basis(data.blaschke, 'interpolation')
    adjoint = compressed_operator(provider or data.jet_provider(), basis)
    scale = basis.scaling
    image_gram = adjoint.conj().T @ basis.gram @ adjoint
    left = scale[:, None] * image_gram * scale[None, :]
    right = scale[:, None] * basis.gram * scale[None, :]
    values, vectors = spla.eigh(0.5 * (left + left.conj().T), 0.5 * (right + right.conj().T))
    return _Compression(basis, adjoint, values, scale[:, None] * vectors)


def pick_matrix(data: HermiteData, bound: float) -> np.ndarray:
    """``bound^2 G - W^H G W``: positive semidefinite iff an interpolant of norm <= bound exists."""
    basis = model_basis(data.blaschke, 'pick')
    adjoint = compressed_operator(data.jet_provider(), basis)
    matrix = bound ** 2 * basis.gram - adjoint.conj().T @ basis.gram @ adjoint
    return 0.5 * (matrix + matrix.conj().T)


def minimal_norm(data: HermiteData) -> float:
    """``inf ||phi||_inf`` over analytic ``phi`` matching the data."""
    return float(np.sqrt(max(_compress(data).eigenvalues[-1], 0.0)))

# -----------------------------------------------------------
# Extremal interpolant
# -----------------------------------------------------------
def _divide_jets(numerator: np.ndarray, denominator: np.ndarray) -> np.ndarray:
    quotient = np.zeros(numerator.size, dtype=complex)
    for k in range(numerator.size):
        quotient[k] = (numerator[k] - np.dot(quotient[:k], denominator[k:0:-1])) / denominator[0]
    return quotient


def boundary_grid(points: Optional[int] = None) -> np.ndarray:
    points = SOLVER_SETTINGS['boundary_grid'] if points is None else int(points)
    return np.exp(2j * np.pi * np.arange(points) / points)


@dataclass(frozen=True, eq=False)
class RationalInterpolant:
    """
    ``phi = numerator / denominator`` with both parts in the same model space.

    ``norm`` is the minimal norm of the problem it solves; ``near_extremal``
    is set when the maximal vector was taken from jittered data.
    """

    numerator: ModelVector
    denominator: ModelVector
    norm: float
    near_extremal: bool = False
    diagnostics: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def flagged(self) -> bool:
        return bool(self.diagnostics)

    def __call__(self, z: Union[complex, np.ndarray]) -> Union[complex, np.ndarray]:
        values = self.numerator.evaluate(z) / self.denominator.evaluate(z)
        return complex(values) if np.ndim(values) == 0 else values

    def jet(self, node: complex, length: int) -> Jet:
        top = self.numerator.jet(node, length).as_array()
        bottom = self.denominator.jet(node, length).as_array()
        return Jet(complex(node), tuple(_divide_jets(top, bottom)))

    def jet_provider(self) -> JetProvider:
        return self.jet

    def boundary_modulus(self, points: Optional[int] = None) -> np.ndarray:
        return np.abs(self(boundary_grid(points)))

    def boundary_trace(self, points: Optional[int] = None) -> pd.DataFrame:
        grid = boundary_grid(points)
        return pd.DataFrame({
            'theta': np.angle(grid) % (2.0 * np.pi),
            're': grid.real,
            'im': grid.imag,
            'modulus': np.abs(self(grid)),
        })

    def as_dict(self) -> Dict[str, Any]:
        modulus = self.boundary_modulus()
        return {
            'norm': self.norm,
            'near_extremal': self.near_extremal,
            'atoms': [dict(complex_to_json(node), order=order) for node, order in self.numerator.basis.atoms],
            'numerator': [complex_to_json(c) for c in self.numerator.coefficients],
            'denominator': [complex_to_json(c) for c in self.denominator.coefficients],
            'boundary_max': float(modulus.max()),
            'boundary_min': float(modulus.min()),
            'diagnostics': list(self.diagnostics),
        }


def _jittered(data: HermiteData, rng: np.random.Generator) -> HermiteData:
    size = SOLVER_SETTINGS['jitter']
    nodes = []
    for point, order, jet in data.nodes:
        noise = rng.standard_normal(order) + 1j * rng.standard_normal(order)
        scale = size * (1.0 + float(np.max(np.abs(jet.as_array()))))
        nodes.append((point, order, Jet(point.value, tuple(jet.as_array() + scale * noise))))
    return HermiteData(tuple(nodes))


def _match_numerator(basis: KernelBasis, data: HermiteData, numerator: np.ndarray, denominator: ModelVector) -> np.ndarray:
    """
    Correct ``numerator`` until its jets at the nodes equal those of ``psi * denominator``.

    A vector of the model space is fixed by its node jets, and
    ``<f, k_λ^(j)> = f^(j)(λ)`` turns each correction into a Gram solve.
    """
    position = {atom: index for index, atom in enumerate(basis.atoms)}
    slots = []
    wanted = np.zeros(basis.dimension, dtype=complex)
    for point, order, target in data.nodes:
        index = [position[(point.value, j)] for j in range(order)]
        scale = np.array([factorial(j) for j in range(order)], dtype=float)
        bottom = denominator.jet(point.value, order).as_array()
        wanted[index] = np.convolve(target.as_array(), bottom)[:order] * scale
        slots.append((point.value, order, index, scale))

    coefficients = np.asarray(numerator, dtype=complex)
    for _ in range(SOLVER_SETTINGS['refine_steps']):
        current = basis.vector(coefficients)
        produced = np.zeros(basis.dimension, dtype=complex)
        for node, order, index, scale in slots:
            produced[index] = current.jet(node, order).as_array() * scale
        coefficients = coefficients + basis.solve(wanted - produced)
    return coefficients


def solve(data: HermiteData, seed: Optional[int] = None) -> RationalInterpolant:
    """
    Minimal-norm interpolant ``phi = T x / x`` with ``x = T* y`` for a maximal vector ``y`` of ``T T*``.

    Any ``x`` without zeros at the nodes gives an interpolant; a maximal one
    gives the extremal. The numerator is then corrected against the node
    jets of ``psi x``, so the jets hold even when ``y`` is inexact. When the top eigenvalue is not simple the data is
    jittered, the maximal vector of the jittered problem is used with the
    original operator and the result is marked ``near_extremal``.
    """
    compression = _compress(data)
    basis, adjoint = compression.basis, compression.adjoint
    values = compression.eigenvalues
    sigma_squared = max(float(values[-1]), 0.0)
    sigma = float(np.sqrt(sigma_squared))
    gap_tol = SOLVER_SETTINGS['gap_tol'] * max(1.0, sigma_squared)
    diagnostics: List[str] = []
    near_extremal = False

    first_kernel = np.zeros(basis.dimension, dtype=complex)
    first_kernel[0] = 1.0
    if sigma_squared <= gap_tol:
        # all targets vanish: phi = 0
        return RationalInterpolant(basis.vector(np.zeros(basis.dimension)), basis.vector(first_kernel), 0.0)

    if basis.dimension == 1 or values[-1] - values[-2] > gap_tol:
        maximal = compression.eigenvectors[:, -1]
        numerator = sigma_squared * maximal
    elif values[-1] - values[0] <= gap_tol:
        # every vector is maximal
        maximal = first_kernel
        numerator = sigma_squared * maximal
    else:
        rng = np.random.default_rng(RUN_DEFAULTS['seed'] if seed is None else seed)
        jittered = _compress(_jittered(data, rng))
        maximal = jittered.eigenvectors[:, -1]
        numerator = basis.solve(adjoint.conj().T @ basis.gram @ adjoint @ maximal)
        near_extremal = True
        toolkit_logger.warning(
            "solve: top eigenvalue is not simple (gap %.3e); using jittered maximal vector",
            values[-1] - values[-2],
        )
        diagnostics.append("degenerate maximal space; near-extremal solution from jittered data")

    denominator = basis.vector(adjoint @ maximal)
    numerator = _match_numerator(basis, data, numerator, denominator)
    interpolant = RationalInterpolant(basis.vector(numerator), denominator, sigma, near_extremal)
    diagnostics.extend(_contract_violations(interpolant, data, sigma, near_extremal))
    for message in diagnostics[int(near_extremal):]:
        toolkit_logger.warning("solve: %s", message)
    return RationalInterpolant(interpolant.numerator, interpolant.denominator, sigma, near_extremal, tuple(diagnostics))


def _contract_violations(interpolant: RationalInterpolant, data: HermiteData, sigma: float, near_extremal: bool) -> List[str]:
    messages = []
    jet_tol = SOLVER_SETTINGS['jet_tol']
    for point, order, target in data.nodes:
        produced = interpolant.jet(point.value, order).as_array()
        error = float(np.max(np.abs(produced - target.as_array())))
        if error > jet_tol * (1.0 + float(np.max(np.abs(target.as_array())))):
            messages.append(f"jet mismatch {error:.3e} at node {point.value}")
    modulus = interpolant.boundary_modulus()
    flatness = SOLVER_SETTINGS['flatness_tol']
    if modulus.max() > sigma * (1.0 + flatness) + 1e-12:
        messages.append(f"boundary maximum {modulus.max():.12g} exceeds the minimal norm {sigma:.12g}")
    if not near_extremal and modulus.min() < sigma * (1.0 - flatness) - 1e-12:
        messages.append(f"boundary modulus not flat (min {modulus.min():.12g}, norm {sigma:.12g})")
    return messages

# -----------------------------------------------------------
# Interpolation constants
# -----------------------------------------------------------
def _canonical(sequence: Sequence[SpectralData]) -> List[SpectralData]:
    def key(matrix: SpectralData) -> Tuple[Any, ...]:
        spectrum = sorted((point.value.real, point.value.imag, order) for point, order in matrix.entries)
        return (tuple(spectrum), matrix.label)
    return sorted(sequence, key=key)


def _random_unit_target(rng: np.random.Generator) -> JetProvider:
    degree = int(rng.integers(1, 4))
    radii = 0.9 * np.sqrt(rng.random(degree))
    zeros = radii * np.exp(2j * np.pi * rng.random(degree))
    rotation = np.exp(2j * np.pi * rng.random())
    B = FiniteBlaschke.from_zeros(list(zeros))
    base = blaschke_jets(B)

    def provider(node: complex, length: int) -> Jet:
        return base(node, length).scale(rotation)

    return provider


@dataclass(frozen=True)
class InterpolationConstantReport:
    value: float
    trials: int
    trial_norms: Tuple[float, ...]
    separation: Optional[float] = None

    @property
    def heuristic_scale(self) -> Optional[float]:
        if self.separation is None or self.separation <= 0.0:
            return None
        return 1.0 / self.separation

    def as_dict(self) -> Dict[str, Any]:
        return {
            'interpolation_constant_lower_bound': self.value,
            'trials': self.trials,
            'trial_norms': list(self.trial_norms),
            'uniform_strong_separation': self.separation,
            'heuristic_scale': self.heuristic_scale,
        }


def interpolation_constant_report(
    sequence: Sequence[SpectralData],
    trials: Optional[int] = None,
    seed: Optional[int] = None,
    with_separation: bool = True,
) -> InterpolationConstantReport:
    """
    Sampled lower bound for the interpolation constant of a finite sequence.

    Trial 0 is the constant target 1; the others draw a rotated random
    Blaschke product of degree 1..3 per matrix, in canonical matrix order.
    """
    ordered = _canonical(sequence)
    if not ordered:
        raise InputError("interpolation_constant needs at least one matrix")
    trials = RUN_DEFAULTS['trials'] if trials is None else int(trials)
    rng = np.random.default_rng(RUN_DEFAULTS['seed'] if seed is None else seed)
    norms = [minimal_norm(hermite_data_from_matrices(ordered, [constant_jets(1.0)] * len(ordered)))]
    for _ in range(max(trials - 1, 0)):
        targets = [_random_unit_target(rng) for _ in ordered]
        norms.append(minimal_norm(hermite_data_from_matrices(ordered, targets)))

    separation = None
    if with_separation and len(ordered) > 1:
        factors = [blaschke_of_matrix(matrix) for matrix in ordered]
        separation = uniform_strong_separation(factors, tol=SCAN_SETTINGS['tol']).value
    return InterpolationConstantReport(max(norms), len(norms), tuple(norms), separation)


def interpolation_constant(sequence: Sequence[SpectralData], trials: Optional[int] = None, seed: Optional[int] = None) -> float:
    return interpolation_constant_report(sequence, trials, seed, with_separation=False).value

# -----------------------------------------------------------
# Beurling functions
# -----------------------------------------------------------
@dataclass(frozen=True, eq=False)
class BeurlingFunction:
    """``f_j = (sum_k weights[k] g_k)^2`` with ``f_j(A_k) = δ_jk Id``."""

    index: int
    solutions: Tuple[RationalInterpolant, ...]
    weights: Tuple[complex, ...]
    bound: float

    def _average(self, z: Union[complex, np.ndarray]) -> Union[complex, np.ndarray]:
        total = 0j
        for weight, solution in zip(self.weights, self.solutions):
            total = total + weight * solution(z)
        return total

    def __call__(self, z: Union[complex, np.ndarray]) -> Union[complex, np.ndarray]:
        return self._average(z) ** 2

    def jet(self, node: complex, length: int) -> Jet:
        total = Jet.constant(node, 0.0, length)
        for weight, solution in zip(self.weights, self.solutions):
            total = total + solution.jet(node, length).scale(weight)
        return total * total

    def jet_provider(self) -> JetProvider:
        return self.jet


def beurling_functions(
    sequence: Sequence[SpectralData],
    slack: Optional[float] = None,
    trials: Optional[int] = None,
    seed: Optional[int] = None,
) -> List[BeurlingFunction]:
    """
    ``f_j = ((1/n) sum_k ω^{-jk} g_k)^2`` where ``g_k(A_m) = ω^{mk} Id`` is solved with minimal norm.

    By Parseval ``sum_j |f_j| = (1/n) sum_k |g_k|^2``, so the sum is bounded
    by the square of the largest ``g_k`` norm; ``bound`` is ``M^2 + slack``
    with ``M`` the larger of that norm and the sampled interpolation constant.
    """
    sequence = list(sequence)
    n = len(sequence)
    if n == 0:
        raise InputError("beurling_functions needs at least one matrix")
    slack = RUN_DEFAULTS['slack'] if slack is None else float(slack)
    if slack <= 0:
        raise InputError(f"slack {slack} must be positive")
    omega = np.exp(2j * np.pi / n)

    solutions = []
    for k in range(1, n + 1):
        targets = [constant_jets(omega ** (m * k)) for m in range(1, n + 1)]
        solutions.append(solve(hermite_data_from_matrices(sequence, targets), seed=seed))
    constant = max(solution.norm for solution in solutions)
    if trials is None or trials > 0:
        constant = max(constant, interpolation_constant(sequence, trials, seed))
    bound = constant ** 2 + slack

    return [
        BeurlingFunction(
            index=j,
            solutions=tuple(solutions),
            weights=tuple(omega ** (-j * k) / n for k in range(1, n + 1)),
            bound=bound,
        )
        for j in range(1, n + 1)
    ]


def check_grid(grid_depth: Optional[int] = None) -> np.ndarray:
    """Hyperbolic polar grid out to ``|z| = 0.999`` plus the boundary circle."""
    depth = RUN_DEFAULTS['grid_depth'] if grid_depth is None else int(grid_depth)
    radii = np.tanh(np.linspace(0.0, np.arctanh(0.999), 4 * depth + 1))[1:]
    angles = np.exp(2j * np.pi * np.arange(16 * depth) / (16 * depth))
    interior = (radii[:, None] * angles[None, :]).ravel()
    return np.concatenate([[0j], interior, boundary_grid()])


def beurling_sum(functions: Sequence[BeurlingFunction], z: np.ndarray) -> np.ndarray:
    total = np.zeros(np.shape(z))
    for function in functions:
        total = total + np.abs(function(z))
    return total


def beurling_reconstruct(functions: Sequence[BeurlingFunction], targets: Sequence[JetProvider]) -> JetProvider:
    """``f = sum_j f_j phi_j`` as a jet provider, so ``f(A_k) = phi_k(A_k)``."""
    functions = list(functions)
    targets = list(targets)
    if len(functions) != len(targets):
        raise InputError(f"{len(functions)} Beurling functions but {len(targets)} targets")

    def provider(node: complex, length: int) -> Jet:
        total = Jet.constant(node, 0.0, length)
        for function, target in zip(functions, targets):
            total = total + function.jet(node, length) * target(node, length).truncate(length)
        return total

    return provider

# -----------------------------------------------------------
# Problem files
# -----------------------------------------------------------
def _parse_target(item: Any, index: int) -> JetProvider:
    where = f"targets[{index}]"
    if not isinstance(item, dict):
        raise InputError(f"{where}: expected an object")
    kind = item.get('kind')
    if kind == 'polynomial':
        raw = item.get('coeffs')
        if not isinstance(raw, list) or not raw:
            raise InputError(f"{where}.coeffs: expected a nonempty list")
        return polynomial_jets([parse_complex(value, f"{where}.coeffs[{k}]") for k, value in enumerate(raw)])
    if kind == 'blaschke':
        raw = item.get('zeros')
        if not isinstance(raw, list):
            raise InputError(f"{where}.zeros: expected a list")
        zeros = [parse_complex(value, f"{where}.zeros[{k}]") for k, value in enumerate(raw)]
        multiplicities = item.get('multiplicities')
        if multiplicities is not None and (
            not isinstance(multiplicities, list) or len(multiplicities) != len(zeros)
        ):
            raise InputError(f"{where}.multiplicities: expected one entry per zero")
        rotation = parse_complex(item.get('constant', 1.0), f"{where}.constant")
        if abs(abs(rotation) - 1.0) > 1e-9:
            raise InputError(f"{where}.constant: must be unimodular, got {rotation}")
        base = blaschke_jets(FiniteBlaschke.from_zeros(zeros, multiplicities))

        def provider(node: complex, length: int) -> Jet:
            return base(node, length).scale(rotation)

        return provider
    if kind == 'constant':
        return constant_jets(parse_complex(item.get('value'), f"{where}.value"))
    raise InputError(f"{where}.kind: expected 'polynomial', 'blaschke' or 'constant', got {kind!r}")


def targets_from_json(items: Any) -> List[JetProvider]:
    if not isinstance(items, list) or not items:
        raise InputError("targets: expected a nonempty list")
    return [_parse_target(item, index) for index, item in enumerate(items)]


def load_problem(payload: Any) -> Tuple[List[SpectralData], List[JetProvider]]:
    """Read ``{"matrices": [...], "targets": [...]}``."""
    if not isinstance(payload, dict):
        raise InputError("problem: expected an object with 'matrices' and 'targets'")
    sequence = load_sequence(payload.get('matrices'))
    targets = targets_from_json(payload.get('targets'))
    if len(targets) != len(sequence):
        raise InputError(f"problem: {len(sequence)} matrices but {len(targets)} targets")
    return sequence, targets
