"""
Pseudo-hyperbolic geometry of the unit disk.

Blaschke factors, finite Blaschke products with Taylor jets, polynomial
reflection, the distance-splitting identity on a diameter and the geodesic
("depth") coordinates used by the constructions.
"""

# Standard library imports
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

# Third-party imports
import numpy as np

# Local imports
from config import BOUNDARY_GUARD, NUMERIC_SETTINGS
from lib.utils import BoundaryGuardError, InputError

# -----------------------------------------------------------
# Disk points
# -----------------------------------------------------------
@dataclass(frozen=True)
class DiskPoint:
    """A complex number strictly inside ``|z| < 1 - boundary_guard``."""

    value: complex

    def __post_init__(self) -> None:
        try:
            number = complex(self.value)
        except (TypeError, ValueError) as exc:
            raise InputError(f"cannot read {self.value!r} as a disk point") from exc
        if not (np.isfinite(number.real) and np.isfinite(number.imag)):
            raise InputError(f"disk point {number} is not finite")
        if abs(number) >= 1.0 - BOUNDARY_GUARD:
            raise BoundaryGuardError(
                f"point {number} lies at or beyond the boundary guard 1 - {BOUNDARY_GUARD:g}"
            )
        object.__setattr__(self, 'value', number)

    def __complex__(self) -> complex:
        return self.value

    @property
    def gap(self) -> float:
        return 1.0 - abs(self.value)


PointLike = Union[DiskPoint, complex, float, int]


def as_disk_point(point: PointLike) -> DiskPoint:
    if isinstance(point, DiskPoint):
        return point
    return DiskPoint(complex(point))


def _value(point: PointLike) -> complex:
    return point.value if isinstance(point, DiskPoint) else complex(point)

# -----------------------------------------------------------
# Taylor jets
# -----------------------------------------------------------
@dataclass(frozen=True)
class Jet:
    """
    Truncated Taylor data ``[f(a), f'(a), ..., f^(m-1)(a)/(m-1)!]`` at ``node``.

    Coefficients are stored already divided by the factorials. The node may
    lie on the unit circle (boundary jets); only the length is validated.
    """

    node: complex
    coefficients: Tuple[complex, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, 'node', _value(self.node))
        coefficients = tuple(complex(c) for c in self.coefficients)
        if len(coefficients) < 1:
            raise InputError("a jet needs at least one coefficient")
        object.__setattr__(self, 'coefficients', coefficients)

    @classmethod
    def constant(cls, node: PointLike, value: complex, length: int) -> 'Jet':
        return cls(node, (complex(value),) + (0j,) * (length - 1))

    @property
    def length(self) -> int:
        return len(self.coefficients)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coefficients, dtype=complex)

    def truncate(self, length: int) -> 'Jet':
        if length < 1 or length > self.length:
            raise InputError(f"cannot truncate a jet of length {self.length} to {length}")
        return Jet(self.node, self.coefficients[:length])

    def _check_node(self, other: 'Jet') -> None:
        if other.node != self.node:
            raise InputError(f"jets live at different nodes {self.node} and {other.node}")

    def __add__(self, other: 'Jet') -> 'Jet':
        self._check_node(other)
        length = min(self.length, other.length)
        return Jet(self.node, tuple(self.as_array()[:length] + other.as_array()[:length]))

    def __sub__(self, other: 'Jet') -> 'Jet':
        return self + other.scale(-1.0)

    def __mul__(self, other: Union['Jet', complex, float]) -> 'Jet':
        if not isinstance(other, Jet):
            return self.scale(other)
        self._check_node(other)
        length = min(self.length, other.length)
        product = np.convolve(self.as_array()[:length], other.as_array()[:length])[:length]
        return Jet(self.node, tuple(product))

    __rmul__ = __mul__

    def scale(self, factor: complex) -> 'Jet':
        return Jet(self.node, tuple(complex(factor) * self.as_array()))

    def power(self, exponent: int) -> 'Jet':
        result = Jet.constant(self.node, 1.0, self.length)
        for _ in range(exponent):
            result = result * self
        return result

    def derivatives(self) -> np.ndarray:
        """Raw derivatives ``f^(i)(a)``, undoing the factorial scaling."""
        factorials = np.cumprod([1.0] + list(range(1, self.length)))
        return self.as_array() * factorials

# -----------------------------------------------------------
# Blaschke factors and distances
# -----------------------------------------------------------
def blaschke_factor(tau: PointLike, z: Union[complex, np.ndarray]) -> Union[complex, np.ndarray]:
    """Return ``b_tau(z) = (tau - z) / (1 - conj(tau) z)``; vectorized in ``z``."""
    t = as_disk_point(tau).value
    values = np.asarray(z, dtype=complex)
    if np.any(np.abs(values) > 1.0 + 1e-12):
        raise InputError("blaschke_factor is defined for |z| <= 1")
    result = (t - values) / (1.0 - np.conj(t) * values)
    if np.ndim(result) == 0:
        return complex(result)
    return result


def pseudo_distance(z1: PointLike, z2: PointLike) -> float:
    """``rho(z1, z2) = |b_{z1}(z2)|``."""
    return float(abs(blaschke_factor(z1, _value(as_disk_point(z2)))))


def pairwise_log_distances(points: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Matrix of ``log rho(points[i], targets[j])``; ``-inf`` where they coincide."""
    a = np.asarray(points, dtype=complex)[:, None]
    b = np.asarray(targets, dtype=complex)[None, :]
    with np.errstate(divide='ignore'):
        return np.log(np.abs((a - b) / (1.0 - np.conj(a) * b)))

# -----------------------------------------------------------
# Finite Blaschke products
# -----------------------------------------------------------
@dataclass(frozen=True)
class FiniteBlaschke:
    """``B(z) = prod b_{a_j}(z)^{m_j}``; the empty product is the constant 1."""

    zeros: Tuple[Tuple[DiskPoint, int], ...] = ()

    def __post_init__(self) -> None:
        normalized: List[Tuple[DiskPoint, int]] = []
        for entry in self.zeros:
            point, multiplicity = entry
            if isinstance(multiplicity, bool) or int(multiplicity) != multiplicity or int(multiplicity) < 1:
                raise InputError(f"multiplicity {multiplicity!r} must be a positive integer")
            normalized.append((as_disk_point(point), int(multiplicity)))
        object.__setattr__(self, 'zeros', tuple(normalized))

    @classmethod
    def from_zeros(cls, points: Iterable[PointLike], multiplicities: Optional[Sequence[int]] = None) -> 'FiniteBlaschke':
        points = list(points)
        if multiplicities is None:
            multiplicities = [1] * len(points)
        if len(multiplicities) != len(points):
            raise InputError("points and multiplicities differ in length")
        return cls(tuple(zip(points, multiplicities)))

    @property
    def degree(self) -> int:
        return sum(multiplicity for _, multiplicity in self.zeros)

    @property
    def zero_values(self) -> np.ndarray:
        return np.array([point.value for point, _ in self.zeros], dtype=complex)

    @property
    def multiplicities(self) -> np.ndarray:
        return np.array([multiplicity for _, multiplicity in self.zeros], dtype=float)

    def __mul__(self, other: 'FiniteBlaschke') -> 'FiniteBlaschke':
        merged: List[Tuple[DiskPoint, int]] = list(self.zeros)
        for point, multiplicity in other.zeros:
            for index, (existing, count) in enumerate(merged):
                if existing == point:
                    merged[index] = (existing, count + multiplicity)
                    break
            else:
                merged.append((point, multiplicity))
        return FiniteBlaschke(tuple(merged))

    def log_modulus(self, z: Union[complex, np.ndarray]) -> np.ndarray:
        """``log|B(z)|`` for an array of points (``-inf`` at zeros)."""
        values = np.atleast_1d(np.asarray(z, dtype=complex))
        if self.degree == 0:
            return np.zeros(values.shape)
        logs = pairwise_log_distances(self.zero_values, values.ravel())
        return (self.multiplicities @ logs).reshape(values.shape)

    def modulus(self, z: Union[complex, np.ndarray]) -> np.ndarray:
        return np.exp(self.log_modulus(z))

    def __call__(self, z: Union[complex, np.ndarray]) -> Union[complex, np.ndarray]:
        values = np.asarray(z, dtype=complex)
        flat = np.atleast_1d(values).ravel()
        if self.degree == 0:
            result = np.ones(flat.shape, dtype=complex)
        elif self.degree > NUMERIC_SETTINGS['log_form_degree']:
            result = self._evaluate_log_form(flat)
        else:
            result = np.ones(flat.shape, dtype=complex)
            for point, multiplicity in self.zeros:
                a = point.value
                result = result * ((a - flat) / (1.0 - np.conj(a) * flat)) ** multiplicity
        if values.ndim == 0:
            return complex(result[0])
        return result.reshape(values.shape)

    evaluate = __call__

    def _evaluate_log_form(self, flat: np.ndarray) -> np.ndarray:
        a = self.zero_values[:, None]
        factors = (a - flat[None, :]) / (1.0 - np.conj(a) * flat[None, :])
        weights = self.multiplicities[:, None]
        with np.errstate(divide='ignore'):
            log_modulus = (weights * np.log(np.abs(factors))).sum(axis=0)
        argument = (weights * np.angle(factors)).sum(axis=0)
        return np.exp(log_modulus) * np.exp(1j * argument)


def _factor_jet_coefficients(tau: complex, z0: complex, length: int) -> np.ndarray:
    denominator = 1.0 - np.conj(tau) * z0
    ratio = np.conj(tau) / denominator
    lead = (tau - z0) / denominator
    coefficients = np.empty(length, dtype=complex)
    coefficients[0] = lead
    power = 1.0 + 0j
    for k in range(1, length):
        previous = power
        power = power * ratio
        coefficients[k] = ((tau - z0) * power - previous) / denominator
    return coefficients


def evaluate_jet(B: FiniteBlaschke, z: complex, order: int) -> Jet:
    """
    Jet ``[B(z), B'(z), ..., B^(order)(z)/order!]`` by the product rule on factor jets.

    Above ``log_form_degree`` the running product is renormalized after every
    factor and the scale is carried as a logarithm, so long products do not
    underflow before the final rescaling.
    """
    z0 = complex(z)
    if abs(z0) > 1.0 + 1e-12:
        raise InputError("evaluate_jet is defined for |z| <= 1")
    if order < 0:
        raise InputError("jet order must be nonnegative")
    length = order + 1
    result = np.zeros(length, dtype=complex)
    result[0] = 1.0
    log_scale = 0.0
    rescale = B.degree > NUMERIC_SETTINGS['log_form_degree']
    for point, multiplicity in B.zeros:
        factor = _factor_jet_coefficients(point.value, z0, length)
        for _ in range(multiplicity):
            result = np.convolve(result, factor)[:length]
            if rescale:
                peak = np.max(np.abs(result))
                if peak == 0.0:
                    return Jet(z0, tuple(result))
                result = result / peak
                log_scale += np.log(peak)
    if rescale:
        result = result * np.exp(log_scale)
    return Jet(z0, tuple(result))

# -----------------------------------------------------------
# Polynomial reflection
# -----------------------------------------------------------
def reflect_polynomial(coefficients: Sequence[complex]) -> List[complex]:
    """
    Coefficients (ascending powers) of ``z^deg conj(p(1 / conj(z)))``.

    The result keeps the input length, so ``z^2`` maps to ``[1, 0, 0]``.
    """
    values = [complex(c) for c in coefficients]
    if not values:
        raise InputError("cannot reflect an empty coefficient list")
    if values[-1] == 0:
        raise InputError("leading coefficient must be nonzero")
    return [c.conjugate() for c in reversed(values)]

# -----------------------------------------------------------
# Distance splitting on a diameter
# -----------------------------------------------------------
def rho_split(lambda1: float, lambda2: float, t: float) -> Tuple[float, float]:
    """
    Split the segment ``[lambda1, lambda2]`` of the real diameter.

    Returns ``(gamma, s)`` where ``gamma`` is the point with
    ``rho(gamma, lambda1) = t * rho(lambda1, lambda2)`` and
    ``s = rho(gamma, lambda2) / rho(lambda1, lambda2) = (1 - t) / (1 - rho^2 t)``.
    """
    if not (0.0 < t < 1.0):
        raise InputError(f"t = {t} must lie in (0, 1)")
    if not (0.0 <= lambda1 < lambda2 < 1.0):
        raise InputError(f"need 0 <= lambda1 < lambda2 < 1, got {lambda1}, {lambda2}")
    rho = (lambda2 - lambda1) / (1.0 - lambda1 * lambda2)
    s1 = t * rho
    gamma = (lambda1 + s1) / (1.0 + lambda1 * s1)
    s = (1.0 - t) / (1.0 - rho * rho * t)
    return gamma, s

# -----------------------------------------------------------
# Geodesic (depth) coordinates on the real diameter
# -----------------------------------------------------------
def depth_of(x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Hyperbolic depth ``artanh(x)`` of a point of the real diameter."""
    return np.arctanh(x)


def point_at_depth(s: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    return np.tanh(s)


def gap_at_depth(s: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """``1 - tanh(s)`` without cancellation for large ``s``."""
    s = np.asarray(s, dtype=float)
    decay = np.exp(-2.0 * np.abs(s))
    positive = 2.0 * decay / (1.0 + decay)
    result = np.where(s >= 0.0, positive, 1.0 - np.tanh(s))
    return float(result) if result.ndim == 0 else result


def depth_distance(s1: Union[float, np.ndarray], s2: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Pseudo-hyperbolic distance ``tanh|s1 - s2|`` of two diameter points."""
    return np.tanh(np.abs(np.asarray(s1) - np.asarray(s2)))


def log_tanh(x: Union[float, np.ndarray]) -> np.ndarray:
    """``log tanh(x)`` for ``x >= 0``, accurate where ``tanh(x)`` rounds to 1."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide='ignore', over='ignore'):
        decay = np.exp(-2.0 * x)
        far = np.log1p(-2.0 * decay / (1.0 + decay))
        near = np.log(np.tanh(x))
    return np.where(x > 1.0, far, near)
