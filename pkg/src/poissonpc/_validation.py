"""Input validation helpers shared by the library functions and estimators."""

import math

import numpy as np
from sklearn.utils.validation import check_array


class ValidationError(ValueError):
    """Raised when user input violates a precondition."""


class CapacityError(ValidationError):
    """Raised when a request would exceed a memory or enumeration cap."""


def check_values(values, *, min_length=1, name="values"):
    """Return ``values`` as a finite 1-D float64 array."""
    try:
        arr = check_array(
            values, ensure_2d=False, dtype=np.float64, ensure_min_samples=0
        )
    except ValueError as exc:
        raise ValidationError(f"{name}: {exc}") from exc
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.shape[0] < min_length:
        raise ValidationError(f"{name} needs at least {min_length} entries, got {arr.shape[0]}")
    return arr


def check_positive(value, name, *, allow_zero=False):
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value}")
    if value < 0 or (value == 0 and not allow_zero):
        bound = ">= 0" if allow_zero else "> 0"
        raise ValidationError(f"{name} must be {bound}, got {value}")
    return value


def check_count(value, name, *, minimum=1):
    if isinstance(value, (bool, np.bool_)) or int(value) != value:
        raise ValidationError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise ValidationError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_prefix(window_n, n, name="N"):
    n = check_count(n, name)
    if n > window_n:
        raise ValidationError(f"{name}={n} exceeds the window length {window_n}")
    return n


def check_ascending(values, *, strict=True, name="values"):
    diffs = np.diff(values)
    ok = np.all(diffs > 0) if strict else np.all(diffs >= 0)
    if not ok:
        raise ValidationError(f"{name} must be {'strictly ' if strict else ''}ascending")


def check_cap(size, cap, what):
    if size > cap:
        raise CapacityError(f"{what}: requested {size:.3g} exceeds the cap {cap:.3g}")
