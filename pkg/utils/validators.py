"""
Shared argument validators
"""
import math

from .exceptions import ModelSpecError


def validate_positive_int(value, name):
    """Validate an integer is >= 1"""
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ModelSpecError(f"{name} must be a positive integer, got {value!r}")
    return value


def validate_positive_real(value, name):
    """Validate a finite real is > 0"""
    if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
        raise ModelSpecError(f"{name} must be a positive real, got {value!r}")
    return float(value)


def validate_open_unit(value, name, error_class=ModelSpecError):
    """Validate a real lies strictly between 0 and 1"""
    if not isinstance(value, (int, float)) or not 0 < value < 1:
        raise error_class(f"{name} must lie in (0, 1), got {value!r}")
    return float(value)


def validate_seed(value):
    """Validate a 64-bit unsigned master seed"""
    if isinstance(value, bool) or not isinstance(value, int) or not 0 <= value < 2 ** 64:
        raise ModelSpecError(f"seed must be an unsigned 64-bit integer, got {value!r}")
    return value
