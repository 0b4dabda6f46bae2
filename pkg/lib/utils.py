# Standard library imports
import logging
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

# Third-party imports
import numpy as np

# -----------------------------------------------------------
# Logging Setup
# -----------------------------------------------------------
# We'll expose the logger so other modules can use it
toolkit_logger = logging.getLogger('carleson')

# -----------------------------------------------------------
# Error Classes
# -----------------------------------------------------------
class ToolkitError(ValueError):
    """Base class for every error raised by the toolkit."""


class InputError(ToolkitError):
    """Malformed input: bad schema, invalid parameters, conflicting jets."""


class BoundaryGuardError(InputError):
    """A disk point sits at or beyond ``1 - boundary_guard``."""


class NumericalDiagnostic(ToolkitError):
    """A computation detected that its own result cannot be trusted."""


class ConditioningError(NumericalDiagnostic):
    """Gram matrix or node set too badly conditioned to proceed."""


class ConstructionError(NumericalDiagnostic):
    """A constructive search failed; ``step`` is the 1-based index that failed."""

    def __init__(self, message: str, step: int):
        super().__init__(f"step {step}: {message}")
        self.step = step

# -----------------------------------------------------------
# Type Coercion Helpers
# -----------------------------------------------------------
def coerce_float(value: Any, default: float = 1.0) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        return default

def coerce_int(value: Any, default: int = 0) -> int:
    try:
        return int(float(value))
    except (TypeError, ValueError):
        return default

def coerce_bool(value: Any, default: bool = False) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, str):
        lowered = value.strip().lower()
        if lowered in ('1', 'true', 'yes', 'on'):
            return True
        if lowered in ('0', 'false', 'no', 'off'):
            return False
        return default
    if isinstance(value, (int, float)):
        return bool(value)
    return default

# -----------------------------------------------------------
# JSON Value Helpers
# -----------------------------------------------------------
def parse_complex(raw: Any, where: str = 'value') -> complex:
    """
    Parse a complex number from its JSON form.

    Accepted shapes: a plain number, ``{"re": x, "im": y}`` (``im`` optional)
    or a two element list ``[x, y]``.
    """
    if isinstance(raw, bool):
        raise InputError(f"{where}: expected a number, got a boolean")
    if isinstance(raw, (int, float)):
        return complex(float(raw), 0.0)
    if isinstance(raw, dict):
        if 're' not in raw:
            raise InputError(f"{where}: missing field 're'")
        try:
            return complex(float(raw['re']), float(raw.get('im', 0.0)))
        except (TypeError, ValueError) as exc:
            raise InputError(f"{where}: non-numeric component ({exc})") from exc
    if isinstance(raw, (list, tuple)) and len(raw) == 2:
        try:
            return complex(float(raw[0]), float(raw[1]))
        except (TypeError, ValueError) as exc:
            raise InputError(f"{where}: non-numeric component ({exc})") from exc
    raise InputError(f"{where}: cannot read {raw!r} as a complex number")

def complex_to_json(value: complex) -> Dict[str, float]:
    value = complex(value)
    return {'re': float(value.real), 'im': float(value.imag)}

def to_jsonable(value: Any) -> Any:
    """Recursively convert numpy scalars, arrays and complex numbers to JSON types."""
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(item) for item in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return complex_to_json(complex(value))
    if isinstance(value, (np.floating, float)):
        number = float(value)
        if math.isnan(number) or math.isinf(number):
            return None
        return number
    return value

# -----------------------------------------------------------
# Validation Helpers
# -----------------------------------------------------------
def validate_tolerance(tol: Any, upper: float = 0.1) -> Tuple[bool, str]:
    """Check that a scan tolerance lies in (0, upper]."""
    try:
        value = float(tol)
    except (TypeError, ValueError):
        return False, f"tolerance {tol!r} is not a number"
    if not (0.0 < value <= upper):
        return False, f"tolerance {value} outside (0, {upper}]"
    return True, ''

def validate_multiplicities(multiplicities: Sequence[Any], strictly_increasing: bool = False) -> Tuple[bool, str]:
    if len(multiplicities) == 0:
        return False, "multiplicity list is empty"
    for position, item in enumerate(multiplicities):
        if isinstance(item, bool) or not isinstance(item, (int, np.integer)) or item < 1:
            return False, f"multiplicity #{position + 1} must be a positive integer, got {item!r}"
    if strictly_increasing:
        for position in range(1, len(multiplicities)):
            if multiplicities[position] <= multiplicities[position - 1]:
                return False, (
                    f"multiplicities must be strictly increasing "
                    f"(#{position} = {multiplicities[position - 1]}, #{position + 1} = {multiplicities[position]})"
                )
    return True, ''

def validate_open_interval(value: Any, lower: float, upper: float, name: str) -> Tuple[bool, str]:
    try:
        number = float(value)
    except (TypeError, ValueError):
        return False, f"{name} {value!r} is not a number"
    if not (lower < number < upper):
        return False, f"{name} = {number} must lie in ({lower}, {upper})"
    return True, ''

def expand_schedule(schedule: str, count: int) -> List[int]:
    """
    Expand a multiplicity schedule name into ``count`` integers.

    ``linear`` gives 1, 2, 3, ...; ``ones`` gives all ones; otherwise a comma
    separated list is read and repeated cyclically.
    """
    text = (schedule or '').strip().lower()
    if text == 'linear':
        return list(range(1, count + 1))
    if text in ('ones', 'constant'):
        return [1] * count
    try:
        pattern = [int(part) for part in text.split(',') if part.strip()]
    except ValueError as exc:
        raise InputError(f"cannot read multiplicity schedule {schedule!r}") from exc
    if not pattern:
        raise InputError(f"empty multiplicity schedule {schedule!r}")
    return [pattern[index % len(pattern)] for index in range(count)]

def first_error(checks: Sequence[Tuple[bool, str]]) -> Optional[str]:
    for ok, message in checks:
        if not ok:
            return message
    return None
