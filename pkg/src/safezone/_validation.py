"""Small input-checking helpers in the spirit of ``sklearn.utils.validation``."""
from __future__ import annotations

import math

import numpy as np

from .exceptions import ValidationError


def check_scalar(value, name, *, min_val=None, max_val=None, include_min=True,
                 include_max=True, integer=False):
    """Validate a scalar parameter and return it as ``float`` (or ``int``)."""
    if integer:
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            raise ValidationError(f"{name} must be an integer, got {value!r}")
        value = int(value)
    else:
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise ValidationError(f"{name} must be a real number, got {value!r}") from None
        if not math.isfinite(value):
            raise ValidationError(f"{name} must be finite, got {value!r}")
    if min_val is not None:
        if value < min_val or (not include_min and value == min_val):
            op = ">=" if include_min else ">"
            raise ValidationError(f"{name} must be {op} {min_val}, got {value}")
    if max_val is not None:
        if value > max_val or (not include_max and value == max_val):
            op = "<=" if include_max else "<"
            raise ValidationError(f"{name} must be {op} {max_val}, got {value}")
    return value


def check_point(p, name="point"):
    arr = np.asarray(p, dtype=float)
    if arr.shape != (2,):
        raise ValidationError(f"{name} must be a 2D point, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} must be finite, got {arr}")
    return arr


def check_array_1d(a, name, *, min_len=1):
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_len:
        raise ValidationError(f"{name} needs at least {min_len} entries, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")
    return arr


def check_boundary_samples(n):
    n = check_scalar(n, "boundary_samples", min_val=8, integer=True)
    if n % 2:
        raise ValidationError(f"boundary_samples must be even, got {n}")
    return n


def wrap_angle(theta):
    """Map an angle to the half-open interval (-pi, pi]."""
    wrapped = math.remainder(float(theta), 2.0 * math.pi)
    if wrapped == -math.pi:
        wrapped = math.pi
    return wrapped
