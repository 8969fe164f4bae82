"""Dense complex matrix helpers and structural predicates.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Basis state
``x`` has bit ``nb-1`` as its most significant bit, so bit ``nb-1`` is the
leftmost tensor factor.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy.linalg import block_diag

MAX_DIM = 2**14


class DimensionError(ValueError):
    """Raised when matrix dimensions are incompatible."""


@dataclass(frozen=True)
class Tolerance:
    """Thresholds used throughout the compiler.

    ``zero_tol`` decides when a cosine/sine is treated as zero,
    ``diag_tol`` bounds off-diagonal entries of matrices declared diagonal
    and ``unitary_tol`` is the per-dimension Frobenius budget for unitarity.
    """

    zero_tol: float = 1e-12
    diag_tol: float = 1e-10
    unitary_tol: float = 1e-10

    def __post_init__(self):
        for name in ("zero_tol", "diag_tol", "unitary_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


DEFAULT_TOL = Tolerance()


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionError(f"expected a non-empty square matrix, got shape {m.shape}")
    return m


def matmul(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    return a @ b


def tensor(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[0] * b.shape[0] > MAX_DIM:
        raise DimensionError(f"tensor product of dims {a.shape[0]} and {b.shape[0]} exceeds {MAX_DIM}")
    return np.kron(a, b)


def tensor_pow(a, r: int) -> np.ndarray:
    """``a`` tensored with itself ``r`` times; ``r == 0`` gives ``[[1]]``."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    return reduce(tensor, [as_matrix(a)] * r, np.ones((1, 1), dtype=complex))


def direct_sum(*mats) -> np.ndarray:
    return np.asarray(block_diag(*[as_matrix(m) for m in mats]), dtype=complex)


def direct_sum_pow(a, r: int) -> np.ndarray:
    if r < 1:
        raise ValueError("r must be positive")
    return direct_sum(*([a] * r))


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def transpose(a) -> np.ndarray:
    return as_matrix(a).T.copy()


def dagger(a) -> np.ndarray:
    return as_matrix(a).conj().T.copy()


def frobenius_dist(a, b) -> float:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    return float(np.linalg.norm(a - b))


def unitarity_residual(a) -> float:
    """Frobenius norm of ``a^dagger a - I``."""
    a = as_matrix(a)
    return float(np.linalg.norm(a.conj().T @ a - np.eye(a.shape[0])))


def is_unitary(a, tol: float = DEFAULT_TOL.unitary_tol) -> bool:
    a = as_matrix(a)
    return unitarity_residual(a) <= a.shape[0] * tol


def max_offdiag(a) -> float:
    a = as_matrix(a)
    off = a - np.diag(np.diag(a))
    return float(np.max(np.abs(off))) if off.size else 0.0


def is_diagonal(a, tol: float = DEFAULT_TOL.zero_tol) -> bool:
    return max_offdiag(a) <= tol


def is_identity(a, tol: float = DEFAULT_TOL.diag_tol) -> bool:
    a = as_matrix(a)
    return float(np.max(np.abs(a - np.eye(a.shape[0])))) <= tol


def num_bits(dim: int) -> int:
    """Register width for a ``2**nb`` dimensional matrix."""
    nb = int(dim).bit_length() - 1
    if dim < 2 or (1 << nb) != dim:
        raise DimensionError(f"dimension {dim} is not a power of two >= 2")
    return nb


def split_blocks(a):
    """Return the four half-size blocks ``(U00, U01, U10, U11)``."""
    a = as_matrix(a)
    n = a.shape[0]
    if n % 2:
        raise DimensionError(f"odd dimension {n} cannot be split in half")
    m = n // 2
    return a[:m, :m], a[:m, m:], a[m:, :m], a[m:, m:]


def diagonal_blocks(a, count: int):
    """The ``count`` equal diagonal blocks of a block-diagonal matrix."""
    a = as_matrix(a)
    size = a.shape[0] // count
    return [a[k * size:(k + 1) * size, k * size:(k + 1) * size] for k in range(count)]


# -- .cmat text format -------------------------------------------------------

_EXP_RE = re.compile(r"e([+-]?)0*(\d)")


def format_real(x: float) -> str:
    """Scientific notation with a 17-digit fraction and unpadded exponent."""
    s = f"{float(x):.17e}"
    return _EXP_RE.sub(lambda m: "e" + ("-" if m.group(1) == "-" else "") + m.group(2), s)


def write_cmat(a, sink) -> None:
    a = as_matrix(a)
    n = a.shape[0]
    lines = [str(n)]
    for row in a:
        lines.append(" ".join(f"{format_real(z.real)} {format_real(z.imag)}" for z in row))
    text = "\n".join(lines) + "\n"
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        with open(sink, "w") as fh:
            fh.write(text)


def parse_cmat(text: str) -> np.ndarray:
    tokens = text.split()
    if not tokens:
        raise ValueError("empty .cmat input")
    try:
        n = int(tokens[0])
    except ValueError:
        raise ValueError(f"bad dimension token {tokens[0]!r}") from None
    if n < 1:
        raise ValueError(f"bad dimension {n}")
    values = tokens[1:]
    if len(values) != 2 * n * n:
        raise ValueError(f"expected {2 * n * n} numbers for dim {n}, found {len(values)}")
    try:
        flat = np.array([float(v) for v in values])
    except ValueError as exc:
        raise ValueError(f"bad number in .cmat input: {exc}") from None
    return (flat[0::2] + 1j * flat[1::2]).reshape(n, n)


def read_cmat(source) -> np.ndarray:
    if hasattr(source, "read"):
        return parse_cmat(source.read())
    with open(source) as fh:
        return parse_cmat(fh.read())
