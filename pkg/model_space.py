"""
Hardy-space kernels and model spaces of finite Blaschke products.

Elements are stored as coefficient vectors over a list of kernel atoms
``(w, j)``, the atom standing for the derivative kernel ``k_w^(j)`` with
``<f, k_w^(j)> = f^(j)(w)``. Inner products come from the closed form of the
mixed derivatives of the Szegő kernel; nothing is orthonormalized except
inside ``frame_bounds``.
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
from config import NUMERIC_SETTINGS
from hyperbolic import FiniteBlaschke, Jet, PointLike, as_disk_point, pseudo_distance
from lib.utils import (
    ConditioningError,
    InputError,
    NumericalDiagnostic,
    complex_to_json,
    toolkit_logger,
)
from separation import uniform_strong_separation

Atom = Tuple[complex, int]
AtomLike = Union[Tuple[PointLike, int], PointLike]

# -----------------------------------------------------------
# Kernel inner products
# -----------------------------------------------------------
def _atom(raw: AtomLike) -> Atom:
    if isinstance(raw, tuple) and len(raw) == 2:
        node, order = raw
    else:
        node, order = raw, 0
    if isinstance(order, bool) or int(order) != order or int(order) < 0:
        raise InputError(f"derivative order {order!r} must be a nonnegative integer")
    return as_disk_point(node).value, int(order)


def _inner_block(rows: np.ndarray, i: int, columns: np.ndarray, j: int) -> np.ndarray:
    """``<k_w^(j), k_v^(i)>`` for every ``v`` in ``rows`` and ``w`` in ``columns``."""
    v = rows[:, None]
    w_bar = np.conj(columns)[None, :]
    base = 1.0 - w_bar * v
    block = np.zeros((rows.size, columns.size), dtype=complex)
    for k in range(min(i, j) + 1):
        coefficient = comb(i, k) * factorial(j) * factorial(i + j - k) / factorial(j - k)
        block += coefficient * v ** (j - k) * w_bar ** (i - k) / base ** (i + j - k + 1)
    return block


def szego_inner(first: AtomLike, second: AtomLike) -> complex:
    """
    ``<k_w^(j), k_v^(i)>`` for ``first = (v, i)`` and ``second = (w, j)``.

    This is the i-th derivative at ``v`` of ``k_w^(j)(z) = j! z^j / (1 - conj(w) z)^(j+1)``.
    """
    v, i = _atom(first)
    w, j = _atom(second)
    return complex(_inner_block(np.array([v]), i, np.array([w]), j)[0, 0])


def gram_between(rows: Sequence[Atom], columns: Sequence[Atom]) -> np.ndarray:
    """Matrix with entry ``[a, b] = szego_inner(rows[a], columns[b]) = <e_b, e_a>``."""
    matrix = np.zeros((len(rows), len(columns)), dtype=complex)
    if not rows or not columns:
        return matrix
    row_orders = np.array([order for _, order in rows])
    column_orders = np.array([order for _, order in columns])
    row_nodes = np.array([node for node, _ in rows], dtype=complex)
    column_nodes = np.array([node for node, _ in columns], dtype=complex)
    for i in np.unique(row_orders):
        row_index = np.flatnonzero(row_orders == i)
        for j in np.unique(column_orders):
            column_index = np.flatnonzero(column_orders == j)
            matrix[np.ix_(row_index, column_index)] = _inner_block(
                row_nodes[row_index], int(i), column_nodes[column_index], int(j)
            )
    return matrix


def kernel_values(atom: AtomLike, z: Union[complex, np.ndarray]) -> np.ndarray:
    """Values of ``k_w^(j)`` at ``z`` (``|z| <= 1`` allowed)."""
    w, j = _atom(atom)
    points = np.asarray(z, dtype=complex)
    return factorial(j) * points ** j / (1.0 - np.conj(w) * points) ** (j + 1)


def kernel_atom_jet(atom: AtomLike, z0: complex, length: int) -> Jet:
    """Taylor jet of ``k_w^(j)`` at ``z0``."""
    w, j = _atom(atom)
    z0 = complex(z0)
    u = 1.0 - np.conj(w) * z0
    q = np.conj(w) / u
    monomial = np.array([comb(j, i) * z0 ** (j - i) if i <= j else 0.0 for i in range(length)], dtype=complex)
    geometric = np.array([comb(j + k, k) * q ** k for k in range(length)], dtype=complex) / u ** (j + 1)
    return Jet(z0, tuple(factorial(j) * np.convolve(monomial, geometric)[:length]))

# -----------------------------------------------------------
# Bases and vectors
# -----------------------------------------------------------
@dataclass(eq=False)
class KernelBasis:
    """
    An ordered list of kernel atoms together with their Gram matrix.

    The Gram matrix is checked after diagonal scaling: its smallest eigenvalue
    must exceed ``gram_rel_tol`` times the largest, and distinct nodes must be
    at least ``node_min_gap`` apart in pseudo-hyperbolic distance.
    """

    atoms: Tuple[Atom, ...]
    source: Optional[FiniteBlaschke] = None
    label: str = ''
    gram: np.ndarray = field(init=False, repr=False)
    _scale: np.ndarray = field(init=False, repr=False)
    _cholesky: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        atoms = tuple(_atom(raw) for raw in self.atoms)
        if not atoms:
            raise InputError(f"basis '{self.label}' needs at least one atom")
        if len(set(atoms)) != len(atoms):
            raise InputError(f"basis '{self.label}' repeats an atom")
        self.atoms = atoms
        self._check_nodes()

        gram = gram_between(atoms, atoms)
        self.gram = 0.5 * (gram + gram.conj().T)
        self._scale = 1.0 / np.sqrt(np.real(np.diag(self.gram)))
        scaled = self._scale[:, None] * self.gram * self._scale[None, :]
        eigenvalues = spla.eigvalsh(scaled)
        if eigenvalues[0] <= NUMERIC_SETTINGS['gram_rel_tol'] * eigenvalues[-1]:
            raise ConditioningError(
                f"basis '{self.label}': Gram matrix is numerically singular "
                f"(eigenvalue ratio {eigenvalues[0] / eigenvalues[-1]:.3e})"
            )
        try:
            self._cholesky = spla.cholesky(scaled, lower=True)
        except np.linalg.LinAlgError as exc:
            raise ConditioningError(f"basis '{self.label}': Cholesky factorization failed") from exc

    def _check_nodes(self) -> None:
        nodes = sorted({node for node, _ in self.atoms}, key=lambda value: (value.real, value.imag))
        min_gap = NUMERIC_SETTINGS['node_min_gap']
        for a in range(len(nodes)):
            if 1.0 - abs(nodes[a]) < NUMERIC_SETTINGS['near_boundary']:
                toolkit_logger.warning("basis '%s': node %s is near the boundary", self.label, nodes[a])
            for b in range(a + 1, len(nodes)):
                if pseudo_distance(nodes[a], nodes[b]) < min_gap:
                    raise ConditioningError(
                        f"basis '{self.label}': nodes {nodes[a]} and {nodes[b]} are closer than {min_gap:g}"
                    )

    @property
    def dimension(self) -> int:
        return len(self.atoms)

    @property
    def nodes(self) -> np.ndarray:
        return np.array([node for node, _ in self.atoms], dtype=complex)

    @property
    def scaling(self) -> np.ndarray:
        """Diagonal scaling ``1 / sqrt(gram[a, a])`` used for every factorization."""
        return self._scale

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve ``gram @ x = rhs`` through the scaled Cholesky factor."""
        rhs = np.asarray(rhs, dtype=complex)
        scale = self._scale if rhs.ndim == 1 else self._scale[:, None]
        return scale * spla.cho_solve((self._cholesky, True), scale * rhs)

    def orthonormal_coefficients(self) -> np.ndarray:
        """Columns ``Q`` with ``Q^H gram Q = I``."""
        identity = np.eye(self.dimension, dtype=complex)
        inverse_adjoint = spla.solve_triangular(self._cholesky, identity, lower=True, trans='C')
        return self._scale[:, None] * inverse_adjoint

    def cross_gram(self, other: 'KernelBasis') -> np.ndarray:
        """Entry ``[a, b] = <e_b, f_a>`` for ``e`` in this basis and ``f`` in ``other``."""
        return gram_between(list(other.atoms), list(self.atoms))

    def vector(self, coefficients: Sequence[complex]) -> 'ModelVector':
        return ModelVector(self, np.asarray(coefficients, dtype=complex))

    def as_dict(self) -> Dict[str, Any]:
        return {
            'label': self.label,
            'atoms': [dict(complex_to_json(node), order=order) for node, order in self.atoms],
            'gram': [[complex_to_json(entry) for entry in row] for row in self.gram],
        }


@dataclass(frozen=True, eq=False)
class ModelVector:
    basis: KernelBasis
    coefficients: np.ndarray

    def __post_init__(self) -> None:
        coefficients = np.array(self.coefficients, dtype=complex).ravel()
        if coefficients.size != self.basis.dimension:
            raise InputError(
                f"vector has {coefficients.size} coefficients, basis '{self.basis.label}' "
                f"has dimension {self.basis.dimension}"
            )
        coefficients.setflags(write=False)
        object.__setattr__(self, 'coefficients', coefficients)

    def inner(self, other: 'ModelVector') -> complex:
        """``<self, other>``, linear in ``self``."""
        if other.basis is self.basis:
            return complex(other.coefficients.conj() @ self.basis.gram @ self.coefficients)
        cross = self.basis.cross_gram(other.basis)
        return complex(other.coefficients.conj() @ cross @ self.coefficients)

    def norm(self) -> float:
        return _quadratic_norm(self.basis.gram, self.coefficients)

    def distance_to(self, other: 'ModelVector') -> float:
        """``||self - other||``; shared atoms are merged before the quadratic form."""
        atoms, coefficients = _merge([self, other], [1.0, -1.0])
        return _quadratic_norm(gram_between(atoms, atoms), coefficients)

    def evaluate(self, z: Union[complex, np.ndarray]) -> np.ndarray:
        points = np.asarray(z, dtype=complex)
        total = np.zeros(points.shape, dtype=complex)
        for coefficient, atom in zip(self.coefficients, self.basis.atoms):
            total = total + coefficient * kernel_values(atom, points)
        return total

    def jet(self, z0: complex, length: int) -> Jet:
        total = np.zeros(length, dtype=complex)
        for coefficient, atom in zip(self.coefficients, self.basis.atoms):
            total += coefficient * kernel_atom_jet(atom, z0, length).as_array()
        return Jet(complex(z0), tuple(total))

    def scale(self, factor: complex) -> 'ModelVector':
        return ModelVector(self.basis, complex(factor) * self.coefficients)

    def __add__(self, other: 'ModelVector') -> 'ModelVector':
        if other.basis is not self.basis:
            raise InputError("vectors over different bases cannot be added in place")
        return ModelVector(self.basis, self.coefficients + other.coefficients)

    def __sub__(self, other: 'ModelVector') -> 'ModelVector':
        return self + other.scale(-1.0)

    def as_dict(self) -> Dict[str, Any]:
        return {
            'atoms': [dict(complex_to_json(node), order=order) for node, order in self.basis.atoms],
            'coefficients': [complex_to_json(value) for value in self.coefficients],
            'norm': self.norm(),
        }


def _quadratic_norm(gram: np.ndarray, coefficients: np.ndarray) -> float:
    value = float(np.real(coefficients.conj() @ gram @ coefficients))
    return float(np.sqrt(max(value, 0.0)))


def _merge(vectors: Sequence[ModelVector], weights: Sequence[complex]) -> Tuple[List[Atom], np.ndarray]:
    merged: Dict[Atom, complex] = {}
    for vector, weight in zip(vectors, weights):
        for atom, coefficient in zip(vector.basis.atoms, vector.coefficients):
            merged[atom] = merged.get(atom, 0j) + weight * coefficient
    atoms = list(merged)
    return atoms, np.array([merged[atom] for atom in atoms], dtype=complex)

# -----------------------------------------------------------
# Model spaces and projections
# -----------------------------------------------------------
def model_basis(B: FiniteBlaschke, label: str = '') -> KernelBasis:
    """Kernel basis of ``H^2 ⊖ B H^2``: orders ``0..m-1`` at every zero of multiplicity ``m``."""
    if B.degree < 1:
        raise InputError("a model space needs a Blaschke product of degree at least 1")
    atoms = tuple((point.value, order) for point, multiplicity in B.zeros for order in range(multiplicity))
    return KernelBasis(atoms, source=B, label=label or f"model(deg {B.degree})")


def _normalized_kernel_rhs(w: complex, basis: KernelBasis) -> np.ndarray:
    """``<k̂_w, e_a>`` for every atom ``e_a`` of ``basis``."""
    return gram_between(list(basis.atoms), [(w, 0)])[:, 0] * np.sqrt(1.0 - abs(w) ** 2)


def project(target: AtomLike, basis: KernelBasis) -> Tuple[ModelVector, float]:
    """
    Orthogonal projection of ``k_w / ||k_w||`` onto the span of ``basis``.

    Returns the projection and ``dist(k̂_w, span) = sqrt(1 - ||projection||^2)``.
    """
    w, order = _atom(target)
    if order != 0:
        raise InputError("project expects a plain kernel target (w, 0)")
    rhs = _normalized_kernel_rhs(w, basis)
    coefficients = basis.solve(rhs)
    captured = float(np.real(np.vdot(coefficients, rhs)))
    distance = float(np.sqrt(min(max(1.0 - captured, 0.0), 1.0)))
    return ModelVector(basis, coefficients), distance


def sine(K: KernelBasis, L: KernelBasis) -> float:
    """
    ``inf{dist(k, span L) : k in span K, ||k|| = 1}``.

    With ``S = G_KK - G_KL G_LL^{-1} G_LK`` the squared residual norm of
    ``x = K c`` is ``c^H S c``, so the answer is the square root of the
    smallest generalized eigenvalue of ``(S, G_KK)``.
    """
    cross = K.cross_gram(L)
    schur = K.gram - cross.conj().T @ L.solve(cross)
    schur = 0.5 * (schur + schur.conj().T)
    scale = K.scaling
    scaled_schur = scale[:, None] * schur * scale[None, :]
    scaled_gram = scale[:, None] * K.gram * scale[None, :]
    smallest = spla.eigh(scaled_schur, scaled_gram, eigvals_only=True)[0]
    return float(np.sqrt(min(max(smallest, 0.0), 1.0)))


def _union(bases: Sequence[KernelBasis], label: str) -> KernelBasis:
    atoms = tuple(atom for basis in bases for atom in basis.atoms)
    return KernelBasis(atoms, label=label)

# -----------------------------------------------------------
# Two-space witness
# -----------------------------------------------------------
@dataclass(frozen=True, eq=False)
class SeparationWitness:
    """
    Projections ``x_i = P_i k̂_z`` onto the two model spaces and ``y`` onto
    the model space of the product, with the measured inequalities.
    """

    x1: ModelVector
    x2: ModelVector
    y: ModelVector
    epsilon: float
    moduli: Tuple[float, float]
    norms: Tuple[float, float]
    gap: float
    residuals: Tuple[float, float]
    expected_residuals: Tuple[float, float]

    @property
    def norm_slack(self) -> float:
        return min(self.norms) - float(np.sqrt(1.0 - self.epsilon ** 2))

    @property
    def gap_slack(self) -> float:
        return 2.0 * self.epsilon - self.gap

    def holds(self, tol: float = 1e-9) -> bool:
        return self.norm_slack >= -tol and self.gap_slack >= -tol

    def as_dict(self) -> Dict[str, Any]:
        return {
            'epsilon': self.epsilon,
            'moduli': list(self.moduli),
            'norms': list(self.norms),
            'gap': self.gap,
            'norm_slack': self.norm_slack,
            'gap_slack': self.gap_slack,
            'residuals': list(self.residuals),
            'expected_residuals': list(self.expected_residuals),
            'x1': self.x1.as_dict(),
            'x2': self.x2.as_dict(),
            'y': self.y.as_dict(),
        }


def separation_witness(B1: FiniteBlaschke, B2: FiniteBlaschke, z: PointLike) -> SeparationWitness:
    """
    Witnesses that ``H_1`` and ``H_2`` nearly share a unit vector when both
    products are small at ``z``: ``||x_i|| >= sqrt(1 - eps^2)`` and
    ``||x_1 - x_2|| <= 2 eps`` with ``eps = max |B_i(z)|``.

    Since ``x_i = P_i y``, ``||x_i - y||^2 = ||y||^2 - ||x_i||^2 = |B_i(z)|^2 (1 - |B_j(z)|^2)``.
    """
    point = as_disk_point(z).value
    x1, _ = project(point, model_basis(B1, 'H1'))
    x2, _ = project(point, model_basis(B2, 'H2'))
    y, _ = project(point, model_basis(B1 * B2, 'H1+H2'))
    moduli = (float(abs(B1(point))), float(abs(B2(point))))
    expected = (
        moduli[0] * float(np.sqrt(max(1.0 - moduli[1] ** 2, 0.0))),
        moduli[1] * float(np.sqrt(max(1.0 - moduli[0] ** 2, 0.0))),
    )
    return SeparationWitness(
        x1=x1,
        x2=x2,
        y=y,
        epsilon=max(moduli),
        moduli=moduli,
        norms=(x1.norm(), x2.norm()),
        gap=x1.distance_to(x2),
        residuals=(x1.distance_to(y), x2.distance_to(y)),
        expected_residuals=expected,
    )

# -----------------------------------------------------------
# Frames
# -----------------------------------------------------------
Subspace = Union[KernelBasis, Sequence[ModelVector]]


def _subspace_vectors(subspace: Subspace) -> List[ModelVector]:
    if isinstance(subspace, KernelBasis):
        identity = np.eye(subspace.dimension, dtype=complex)
        return [subspace.vector(column) for column in identity]
    vectors = list(subspace)
    if not vectors or not all(isinstance(vector, ModelVector) for vector in vectors):
        raise InputError("a subspace is a KernelBasis or a nonempty list of ModelVectors")
    return vectors


def frame_bounds(subspaces: Sequence[Subspace]) -> Tuple[float, float]:
    """
    Extreme eigenvalues of the joint Gram matrix of orthonormal bases of the subspaces.

    ``lower > 0`` exactly when the finite family is a Riesz system; ``upper``
    is the square of its Bessel bound.
    """
    subspaces = list(subspaces)
    if not subspaces:
        raise InputError("frame_bounds needs at least one subspace")
    families = [_subspace_vectors(subspace) for subspace in subspaces]

    index: Dict[Atom, int] = {}
    for vectors in families:
        for vector in vectors:
            for atom in vector.basis.atoms:
                index.setdefault(atom, len(index))
    if len(index) > 2000:
        raise InputError(f"frame_bounds supports at most 2000 atoms, got {len(index)}")
    atoms = list(index)
    gram = gram_between(atoms, atoms)
    gram = 0.5 * (gram + gram.conj().T)

    columns = []
    for position, vectors in enumerate(families):
        local = np.zeros((len(atoms), len(vectors)), dtype=complex)
        for column, vector in enumerate(vectors):
            for atom, coefficient in zip(vector.basis.atoms, vector.coefficients):
                local[index[atom], column] += coefficient
        small = local.conj().T @ gram @ local
        diagonal = np.sqrt(np.real(np.diag(small)))
        if np.any(diagonal <= 0.0):
            raise ConditioningError(f"subspace #{position + 1} contains a zero vector")
        local = local / diagonal[None, :]
        small = small / np.outer(diagonal, diagonal)
        values, rotation = spla.eigh(0.5 * (small + small.conj().T))
        if values[0] <= NUMERIC_SETTINGS['gram_rel_tol'] * values[-1]:
            raise ConditioningError(f"subspace #{position + 1} is spanned by dependent vectors")
        columns.append(local @ (rotation / np.sqrt(values)[None, :]))

    synthesis = np.hstack(columns)
    joint = synthesis.conj().T @ gram @ synthesis
    eigenvalues = spla.eigvalsh(0.5 * (joint + joint.conj().T))
    return float(max(eigenvalues[0], 0.0)), float(eigenvalues[-1])


def monomial_frame_counterexample(gamma: float, blocks: int = 1) -> List[List[ModelVector]]:
    """
    Per block ``b`` the three one-dimensional subspaces spanned by ``z^{3b}``,
    ``z^{3b+1}`` and ``z^{3b} + z^{3b+1} + gamma z^{3b+2}``.

    The lower frame bound is ``1 - sqrt(2 / (2 + gamma^2))``, so it tends to
    zero with ``gamma`` while every pair of subspaces stays well apart.
    """
    if blocks < 1 or blocks > 10:
        raise InputError(f"blocks must lie in 1..10, got {blocks}")
    size = 3 * blocks
    basis = KernelBasis(tuple((0j, j) for j in range(size)), label='monomials')

    def monomial_combination(weights: Dict[int, complex]) -> ModelVector:
        coefficients = np.zeros(size, dtype=complex)
        for power, weight in weights.items():
            coefficients[power] = weight / factorial(power)
        return basis.vector(coefficients)

    subspaces = []
    for block in range(blocks):
        first = 3 * block
        subspaces.append([monomial_combination({first: 1.0})])
        subspaces.append([monomial_combination({first + 1: 1.0})])
        subspaces.append([monomial_combination({first: 1.0, first + 1: 1.0, first + 2: gamma})])
    return subspaces


def normalized_kernel(w: PointLike) -> ModelVector:
    point = as_disk_point(w).value
    basis = KernelBasis(((point, 0),), label=f"k({point})")
    return basis.vector([np.sqrt(1.0 - abs(point) ** 2)])


def frame_separation_sweep(point_sets: Sequence[Sequence[PointLike]], tol: Optional[float] = None) -> pd.DataFrame:
    """
    For each finite point set: the uniform strong separation of its zeros and
    the frame bounds of its normalized kernels. The ``ratio`` column is
    ``lower / separation^2``; values at or above one mean the empirical floor
    held for that set.
    """
    rows = []
    for position, points in enumerate(point_sets):
        points = [as_disk_point(point) for point in points]
        if len(points) < 2:
            raise InputError(f"point set #{position + 1} needs at least two points")
        factors = [FiniteBlaschke.from_zeros([point]) for point in points]
        report = uniform_strong_separation(factors, tol=tol)
        lower, upper = frame_bounds([[normalized_kernel(point)] for point in points])
        separation_squared = report.value ** 2
        rows.append({
            'set': position + 1,
            'size': len(points),
            'uniform_strong_separation': report.value,
            'lower': lower,
            'upper': upper,
            'ratio': lower / separation_squared if separation_squared > 0 else float('inf'),
        })
    return pd.DataFrame(rows, columns=['set', 'size', 'uniform_strong_separation', 'lower', 'upper', 'ratio'])


def three_kernel_identity(w1: PointLike, w2: PointLike, w3: PointLike) -> Tuple[float, float]:
    """``dist(k̂_{w3}, span{k_{w1}, k_{w2}})`` against ``|b_{w1}(w3) b_{w2}(w3)|``."""
    a, b, c = (as_disk_point(point).value for point in (w1, w2, w3))
    basis = KernelBasis(((a, 0), (b, 0)), label='pair')
    _, lhs = project(c, basis)
    rhs = pseudo_distance(a, c) * pseudo_distance(b, c)
    return lhs, float(rhs)

# -----------------------------------------------------------
# Separation measured through kernels
# -----------------------------------------------------------
def kernel_separation(bases: Sequence[KernelBasis], z: PointLike) -> float:
    """``max_n dist(k̂_z, span of the other bases)``; one basis gives 1."""
    bases = list(bases)
    if not bases:
        raise InputError("kernel_separation needs at least one basis")
    point = as_disk_point(z).value
    if len(bases) == 1:
        return 1.0
    best = 0.0
    for n in range(len(bases)):
        others = _union(bases[:n] + bases[n + 1:], f"without #{n + 1}")
        _, distance = project(point, others)
        best = max(best, distance)
    return best


def subspace_strong_separation(bases: Sequence[KernelBasis]) -> float:
    bases = list(bases)
    if len(bases) < 2:
        raise InputError("subspace separation needs at least two bases")
    return min(
        sine(bases[n], _union(bases[:n] + bases[n + 1:], f"without #{n + 1}"))
        for n in range(len(bases))
    )


def weak_subspace_separation(bases: Sequence[KernelBasis]) -> float:
    bases = list(bases)
    if len(bases) < 2:
        raise InputError("subspace separation needs at least two bases")
    return min(
        sine(bases[n], bases[j])
        for n in range(len(bases))
        for j in range(len(bases))
        if n != j
    )


def carleson_constant(points: Sequence[PointLike]) -> Tuple[float, float]:
    """
    Bessel bound of the normalized kernels at ``points`` and its square root.

    The Bessel bound is the best constant in ``sum (1 - |λ|^2) |f(λ)|^2 <= C ||f||^2``.
    """
    nodes = np.array([as_disk_point(point).value for point in points], dtype=complex)
    if nodes.size == 0:
        raise InputError("carleson_constant needs at least one point")
    weights = np.sqrt(1.0 - np.abs(nodes) ** 2)
    gram = gram_between([(node, 0) for node in nodes], [(node, 0) for node in nodes])
    gram = weights[:, None] * gram * weights[None, :]
    bound = float(spla.eigvalsh(0.5 * (gram + gram.conj().T))[-1])
    return bound, float(np.sqrt(bound))


def extremal_kernel_multiple(z: PointLike, a: complex) -> Tuple[ModelVector, float]:
    """Least-norm ``g`` in ``H^2`` with ``g(z) = a``: ``a k_z / ||k_z||^2``, of norm ``|a| sqrt(1 - |z|^2)``."""
    point = as_disk_point(z).value
    basis = KernelBasis(((point, 0),), label=f"k({point})")
    vector = basis.vector([complex(a) * (1.0 - abs(point) ** 2)])
    return vector, abs(complex(a)) * float(np.sqrt(1.0 - abs(point) ** 2))


def dual_distance(w: PointLike, basis: KernelBasis) -> Tuple[ModelVector, float]:
    """
    The least-norm ``y`` orthogonal to ``span(basis)`` with ``<y, k̂_w> = 1``.

    ``y`` is the normalized residual of the projection, and ``||y|| = 1 / dist``.
    """
    point = as_disk_point(w).value
    projection, distance = project(point, basis)
    if distance <= np.sqrt(NUMERIC_SETTINGS['gram_rel_tol']):
        raise NumericalDiagnostic(f"k_{point} lies in the span (distance {distance:.3e}); no dual vector")
    joint = KernelBasis(tuple(basis.atoms) + ((point, 0),), label=f"{basis.label}+k({point})")
    residual = np.concatenate([-projection.coefficients, [np.sqrt(1.0 - abs(point) ** 2)]])
    vector = joint.vector(residual / distance ** 2)
    return vector, vector.norm()

# -----------------------------------------------------------
# Self test
# -----------------------------------------------------------
def self_test(step: Optional[float] = None) -> float:
    """
    Compare ``szego_inner`` with central differences of the kernels.

    Checks the derivative in ``z`` (first order) and in ``conj(w)`` (the
    definition of the derivative kernel). Returns the largest error and raises
    ``NumericalDiagnostic`` above ``1e-6``.
    """
    h = NUMERIC_SETTINGS['self_test_step'] if step is None else float(step)
    cases = [(0.3 + 0.2j, 0.1 - 0.4j, 0), (0.3 + 0.2j, 0.1 - 0.4j, 1), (-0.5j, 0.6, 2), (0.0, 0.45 + 0.1j, 3)]
    worst = 0.0
    for v, w, j in cases:
        # d/dz of k_w^(j) at v
        numeric = (kernel_values((w, j), v + h) - kernel_values((w, j), v - h)) / (2.0 * h)
        worst = max(worst, abs(complex(numeric) - szego_inner((v, 1), (w, j))))
        # k_w^(j+1) = d/d(conj w) of k_w^(j); move conj(w) by h means w by h as well
        shifted = (kernel_values((w + h, j), v) - kernel_values((w - h, j), v)) / (2.0 * h)
        worst = max(worst, abs(complex(shifted) - szego_inner((v, 0), (w, j + 1))))
    if worst > 1e-6:
        raise NumericalDiagnostic(f"Szegő inner product disagrees with finite differences ({worst:.3e})")
    return worst


if NUMERIC_SETTINGS['self_test']:
    toolkit_logger.info("model_space self test: max error %.3e", self_test())
