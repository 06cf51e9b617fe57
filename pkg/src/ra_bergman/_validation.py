"""Input validation helpers in the style of ``sklearn.utils.validation``."""

import numbers

import numpy as np

from .exceptions import InvalidInputError, InvalidParameterError


def check_complex_array(Z, *, name="Z", allow_scalar=True, finite=True):
    """Coerce ``Z`` to a 1-D complex ndarray.

    Accepts complex scalars/arrays and real arrays of shape (n, 2) holding
    (re, im) pairs. Returns ``(array, was_scalar)``.
    """
    arr = np.asarray(Z)
    scalar = arr.ndim == 0
    if scalar and not allow_scalar:
        raise InvalidInputError(f"{name} must be array-like, got a scalar")
    if arr.dtype.kind not in "biufc":
        raise InvalidInputError(f"{name} must be numeric, got dtype {arr.dtype}")
    if arr.ndim == 2 and arr.shape[1] == 2 and arr.dtype.kind != "c":
        arr = arr[:, 0] + 1j * arr[:, 1]
    arr = np.atleast_1d(arr).astype(complex).ravel()
    if finite and not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains NaN or infinite values")
    return arr, scalar


def check_positive(value, name, *, strict=True, integer=False):
    kind = numbers.Integral if integer else numbers.Real
    if isinstance(value, bool) or not isinstance(value, kind):
        raise InvalidParameterError(f"{name} must be {'an integer' if integer else 'a real number'}, got {value!r}")
    if not np.isfinite(value) or (value <= 0 if strict else value < 0):
        raise InvalidParameterError(f"{name} must be {'>' if strict else '>='} 0, got {value!r}")
    return value


def check_tolerance(tol, name="tol"):
    return float(check_positive(tol, name))
