"""Named matrices and bit-labelled operators.

Bit ``alpha`` of an ``nb``-bit register lives in tensor slot
``nb - 1 - alpha`` counted from the left.
"""

from __future__ import annotations

import numpy as np

from .matrix_core import MAX_DIM, DimensionError, direct_sum, identity, tensor, tensor_pow

SQRT1_2 = 1 / np.sqrt(2)


def _check_nb(nb: int) -> int:
    nb = int(nb)
    if nb < 1:
        raise ValueError(f"nb must be positive, got {nb}")
    if 2**nb > MAX_DIM:
        raise DimensionError(f"{nb} bits exceeds the dense-matrix budget ({MAX_DIM} states)")
    return nb


def _check_bit(nb: int, alpha: int, name: str = "alpha") -> int:
    if not 0 <= alpha < nb:
        raise ValueError(f"{name}={alpha} outside 0..{nb - 1}")
    return int(alpha)


def bit(x, alpha: int):
    """Bit ``alpha`` of basis index ``x`` (works on arrays)."""
    return (np.asarray(x) >> alpha) & 1


def pauli(axis: str) -> np.ndarray:
    mats = {
        "x": [[0, 1], [1, 0]],
        "y": [[0, -1j], [1j, 0]],
        "z": [[1, 0], [0, -1]],
    }
    try:
        return np.array(mats[axis.lower()], dtype=complex)
    except KeyError:
        raise ValueError(f"unknown Pauli axis {axis!r}") from None


def hadamard1() -> np.ndarray:
    return SQRT1_2 * np.array([[1, 1], [1, -1]], dtype=complex)


def hadamard_n(nb: int) -> np.ndarray:
    return tensor_pow(hadamard1(), _check_nb(nb))


def dft(nb: int) -> np.ndarray:
    ns = 2 ** _check_nb(nb)
    x = np.arange(ns)
    return np.exp(2j * np.pi * np.outer(x, x) / ns) / np.sqrt(ns)


def d_matrix(r: int) -> np.ndarray:
    """``(H sigma_z)`` on the top bit of an ``r``-bit register."""
    if r < 1:
        raise ValueError("r must be positive")
    return tensor(hadamard1() @ pauli("z"), tensor_pow(identity(2), r - 1))


def omega(nb: int) -> complex:
    return np.exp(2j * np.pi / 2 ** _check_nb(nb))


def omega_gate(nb: int, power: int = 1) -> np.ndarray:
    return np.diag([1, omega(nb) ** power]).astype(complex)


def v_gate(nb: int, alpha: int, beta: int) -> np.ndarray:
    """Diagonal ``exp(i pi n(alpha) n(beta) / 2**|alpha - beta|)``."""
    nb = _check_nb(nb)
    _check_bit(nb, alpha)
    _check_bit(nb, beta, "beta")
    if alpha == beta:
        raise ValueError("V(alpha, beta) needs two distinct bits")
    x = np.arange(2**nb)
    both = bit(x, alpha) * bit(x, beta)
    return np.diag(np.exp(1j * np.pi * both / 2 ** abs(alpha - beta)))


def _perm_from_map(nb: int, new_index) -> np.ndarray:
    ns = 2**nb
    x = np.arange(ns)
    m = np.zeros((ns, ns), dtype=complex)
    m[new_index(x), x] = 1
    return m


def exchange(nb: int, i: int, j: int) -> np.ndarray:
    """Permutation matrix swapping the values of bits ``i`` and ``j``."""
    nb = _check_nb(nb)
    _check_bit(nb, i, "i")
    _check_bit(nb, j, "j")
    if i == j:
        raise ValueError("exchange needs two distinct bits")

    def swap(x):
        differ = bit(x, i) ^ bit(x, j)
        return x ^ (differ << i) ^ (differ << j)

    return _perm_from_map(nb, swap)


def bit_reversal(nb: int) -> np.ndarray:
    nb = _check_nb(nb)

    def rev(x):
        out = np.zeros_like(x)
        for a in range(nb):
            out |= bit(x, a) << (nb - 1 - a)
        return out

    return _perm_from_map(nb, rev)


def embed(gate2, nb: int, alpha: int) -> np.ndarray:
    gate2 = np.asarray(gate2, dtype=complex)
    if gate2.shape != (2, 2):
        raise DimensionError(f"embed expects a 2x2 gate, got shape {gate2.shape}")
    nb = _check_nb(nb)
    _check_bit(nb, alpha)
    left = tensor_pow(identity(2), nb - 1 - alpha)
    return tensor(tensor(left, gate2), tensor_pow(identity(2), alpha))


def ab_blocks(r: int, nb: int) -> tuple[np.ndarray, np.ndarray]:
    """The pair ``(A_r, B_r)`` with ``A_r = I`` and
    ``B_r = -Omega^(2^(nb-2)) x Omega^(2^(nb-3)) x ... `` (``r`` factors).
    """
    nb = _check_nb(nb)
    if not 0 <= r < nb:
        raise ValueError(f"r={r} outside 0..{nb - 1}")
    b = -np.ones((1, 1), dtype=complex)
    for k in range(1, r + 1):
        b = tensor(b, omega_gate(nb, 2 ** (nb - 1 - k)))
    return identity(2**r), b


def delta_op(nb: int, top_bit: int) -> np.ndarray:
    """``sigma_z(t)`` times every ``V(t, beta)`` with ``beta < t``."""
    nb = _check_nb(nb)
    _check_bit(nb, top_bit, "top_bit")
    out = embed(pauli("z"), nb, top_bit)
    for beta in range(top_bit - 1, -1, -1):
        out = out @ v_gate(nb, top_bit, beta)
    return out


def delta_blocks(nb: int, top_bit: int) -> np.ndarray:
    """``I^(nb-1-t) x (A_t + B_t)``, the block form of :func:`delta_op`."""
    a, b = ab_blocks(top_bit, nb)
    return tensor(tensor_pow(identity(2), nb - 1 - top_bit), direct_sum(a, b))


def qfft_product(nb: int) -> np.ndarray:
    """``H(nb-1) V.. H(nb-2) V.. ... H(0) R``, the gate-level Fourier circuit."""
    nb = _check_nb(nb)
    h = hadamard1()
    out = identity(2**nb)
    for t in range(nb - 1, -1, -1):
        out = out @ embed(h, nb, t)
        for beta in range(t - 1, -1, -1):
            out = out @ v_gate(nb, t, beta)
    return out @ bit_reversal(nb)


def random_unitary(nb: int, seed: int) -> np.ndarray:
    """Seeded unitary from the QR factorisation of a complex Gaussian matrix."""
    ns = 2 ** _check_nb(nb)
    rng = np.random.default_rng(np.uint64(seed))
    z = (rng.standard_normal((ns, ns)) + 1j * rng.standard_normal((ns, ns))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


GENERATORS = {
    "hadamard": hadamard_n,
    "dft": dft,
    "bitrev": bit_reversal,
    "random-unitary": random_unitary,
}
