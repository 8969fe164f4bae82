"""Input checks shared by the estimator and the CLI.

sklearn's ``check_array`` rejects complex data, so these are hand-rolled.
"""

from __future__ import annotations

import numpy as np

from .csd import NotUnitaryError
from .matrix_core import DEFAULT_TOL, DimensionError, num_bits, unitarity_residual


def check_power_of_two(dim: int) -> int:
    """Return ``nb`` with ``dim == 2**nb``, or raise ``DimensionError``."""
    return num_bits(int(dim))


def check_unitary(u, tol: float = DEFAULT_TOL.unitary_tol) -> np.ndarray:
    """Square, power-of-two, finite and unitary complex matrix."""
    a = np.asarray(u)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    check_power_of_two(a.shape[0])
    a = a.astype(complex)
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains NaN or inf")
    residual = unitarity_residual(a)
    if residual > a.shape[0] * tol:
        raise NotUnitaryError(residual, a.shape[0])
    return a


def check_state_batch(x, nb: int) -> np.ndarray:
    """2-D complex array with one state vector of length ``2**nb`` per row."""
    a = np.asarray(x)
    if a.ndim == 1:
        a = a[None, :]
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-D array of states, got {a.ndim} dims")
    if a.shape[1] != 2**nb:
        raise DimensionError(f"states have length {a.shape[1]}, expected {2**nb}")
    a = a.astype(complex)
    if not np.all(np.isfinite(a)):
        raise ValueError("states contain NaN or inf")
    return a
