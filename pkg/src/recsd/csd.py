"""One step of the Cosine-Sine Decomposition.

``U = (L0 + L1) [[C, S], [-S, C]] (R0 + R1)`` with ``+`` the direct sum.
The stunted variants return diagonal left (or right) factors whenever the
input allows it, which is what makes recursive trees degenerate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrix_core import (
    DEFAULT_TOL,
    DimensionError,
    Tolerance,
    as_matrix,
    direct_sum,
    is_unitary,
    max_offdiag,
    split_blocks,
    unitarity_residual,
)


class NotUnitaryError(ValueError):
    def __init__(self, residual: float, dim: int):
        super().__init__(f"matrix of dim {dim} is not unitary: ||U^dagger U - I||_F = {residual:.3e}")
        self.residual = residual
        self.dim = dim


@dataclass(frozen=True)
class CsdFactors:
    l0: np.ndarray
    l1: np.ndarray
    theta: np.ndarray
    r0: np.ndarray
    r1: np.ndarray

    @property
    def cos(self) -> np.ndarray:
        return np.cos(self.theta)

    @property
    def sin(self) -> np.ndarray:
        return np.sin(self.theta)

    def left(self) -> np.ndarray:
        return direct_sum(self.l0, self.l1)

    def right(self) -> np.ndarray:
        return direct_sum(self.r0, self.r1)

    def middle(self) -> np.ndarray:
        return d_block(self.theta)

    def reconstruct(self) -> np.ndarray:
        return self.left() @ self.middle() @ self.right()

    def transposed(self) -> "CsdFactors":
        """Factors of ``U^T`` given factors of ``U``."""
        return CsdFactors(self.r0.T, self.r1.T, -self.theta, self.l0.T, self.l1.T)


def d_block(theta) -> np.ndarray:
    """``[[C, S], [-S, C]]`` for the angle vector ``theta``."""
    theta = np.asarray(theta, dtype=float)
    c = np.diag(np.cos(theta))
    s = np.diag(np.sin(theta))
    return np.block([[c, s], [-s, c]]).astype(complex)


def _validate(u, tol: Tolerance) -> np.ndarray:
    u = as_matrix(u)
    n = u.shape[0]
    if n % 2:
        raise DimensionError(f"CSD needs an even dimension, got {n}")
    if not is_unitary(u, tol.unitary_tol):
        raise NotUnitaryError(unitarity_residual(u), n)
    return u


def _polar(m: np.ndarray) -> np.ndarray:
    w, _, vh = np.linalg.svd(m)
    return w @ vh


def _ok(u, f: CsdFactors, tol: Tolerance) -> bool:
    n = u.shape[0]
    if np.linalg.norm(f.reconstruct() - u) > n * tol.unitary_tol:
        return False
    return all(is_unitary(b, tol.unitary_tol) for b in (f.l0, f.l1, f.r0, f.r1))


def _push_scalar_left(f: CsdFactors, tol: Tolerance) -> CsdFactors:
    """If the left factor is a multiple of I, move that phase into the right one."""
    left = np.concatenate([np.diag(f.l0), np.diag(f.l1)])
    if max_offdiag(f.l0) > tol.diag_tol or max_offdiag(f.l1) > tol.diag_tol:
        return f
    if np.max(np.abs(left - left[0])) > tol.diag_tol or abs(left[0] - 1) <= tol.diag_tol:
        return f
    m = f.l0.shape[0]
    phase = left[0]
    eye = np.eye(m, dtype=complex)
    return CsdFactors(eye, eye.copy(), f.theta, phase * f.r0, phase * f.r1)


def _left_stunted(u: np.ndarray, tol: Tolerance) -> CsdFactors | None:
    u00, u01, u10, u11 = split_blocks(u)
    if max_offdiag(u00 @ u10.conj().T) > tol.diag_tol or max_offdiag(u01 @ u11.conj().T) > tol.diag_tol:
        return None
    m = u00.shape[0]
    r0 = np.empty((m, m), dtype=complex)
    r1 = np.empty((m, m), dtype=complex)
    l0 = np.ones(m, dtype=complex)
    l1 = np.ones(m, dtype=complex)
    theta = np.empty(m)
    for j in range(m):
        top, bot = u00[j], u10[j]
        base = top if np.linalg.norm(top) >= np.linalg.norm(bot) else bot
        base = base / np.linalg.norm(base)
        # first entry of comparable size fixes the row phase; it becomes real positive
        mags = np.abs(base)
        ref = int(np.argmax(mags >= 0.5 * mags.max()))
        row = base * (abs(base[ref]) / base[ref])
        r0[j] = row
        z0 = top @ row.conj()
        z1 = bot @ row.conj()
        c, s_abs = abs(z0), abs(z1)
        if c > tol.zero_tol:
            l0[j] = z0 / c
        if s_abs > tol.zero_tol:
            l1[j] = z1 / s_abs
        # sin is taken <= 0 so the rotation matches (H sigma_z) on the top bit
        theta[j] = np.arctan2(-s_abs, c)
        cj, sj = np.cos(theta[j]), np.sin(theta[j])
        if abs(sj) > cj:
            r1[j] = u01[j] / (l0[j] * sj)
        else:
            r1[j] = u11[j] / (l1[j] * cj)
    f = CsdFactors(np.diag(l0), np.diag(l1), theta, r0, r1)
    f = _push_scalar_left(f, tol)
    return f if _ok(u, f, tol) else None


def csd_try_stunted(u, side: str = "left", tol: Tolerance = DEFAULT_TOL) -> CsdFactors | None:
    """CSD with diagonal ``L0, L1`` (``side='left'``) or ``R0, R1`` (``'right'``).

    Returns ``None`` when the input does not admit such a factorisation.
    The left test is diagonality of ``U00 U10^dagger`` and ``U01 U11^dagger``;
    the right test is the same on the transpose, i.e. diagonality of
    ``U00^dagger U01`` and ``U10^dagger U11``.
    """
    u = _validate(u, tol)
    if side == "left":
        return _left_stunted(u, tol)
    if side == "right":
        f = _left_stunted(u.T, tol)
        return None if f is None else f.transposed()
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def _general(u: np.ndarray, tol: Tolerance) -> CsdFactors:
    u00, u01, u10, u11 = split_blocks(u)
    w, sig, vh = np.linalg.svd(u00)
    # ascending cosine, so the large-sine columns come first in the QR below
    l0, c, r0 = w[:, ::-1], np.clip(sig[::-1], 0.0, 1.0), vh[::-1]
    q = u10 @ r0.conj().T  # = -L1 S
    y, t = np.linalg.qr(q)
    tdiag = np.diag(t)
    mag = np.abs(tdiag)
    phase = np.where(mag > tol.zero_tol, tdiag / np.where(mag > 0, mag, 1), 1)
    l1 = y * phase
    theta = np.arctan2(-mag, c)
    cos, sin = np.cos(theta), np.sin(theta)
    from_u11 = (l1.conj().T @ u11) / np.where(cos > 0, cos, 1)[:, None]
    from_u01 = (l0.conj().T @ u01) / np.where(sin != 0, sin, 1)[:, None]
    r1 = np.where((cos >= np.abs(sin))[:, None], from_u11, from_u01)
    r1 = _polar(r1)
    l0, l1, r0 = _polar(l0), _polar(l1), _polar(r0)
    if np.ptp(theta) <= tol.diag_tol:
        # equal angles commute with anything block-uniform: move L0 to the right
        l0h = l0.conj().T
        l0, l1, r0, r1 = np.eye(len(theta), dtype=complex), l1 @ l0h, l0 @ r0, l0 @ r1
    return CsdFactors(l0, l1, theta, r0, r1)


def csd(u, tol: Tolerance = DEFAULT_TOL) -> CsdFactors:
    """Cosine-Sine Decomposition of an even-dimensional unitary.

    Tries a left-stunted factorisation, then a right-stunted one, then the
    general SVD route. Angles lie in ``[-pi/2, pi/2]`` with ``cos >= 0``.
    """
    u = _validate(u, tol)
    for side in ("left", "right"):
        f = csd_try_stunted(u, side, tol)
        if f is not None:
            return f
    f = _general(u, tol)
    err = np.linalg.norm(f.reconstruct() - u)
    if err > u.shape[0] * tol.unitary_tol:
        raise ArithmeticError(f"CSD reconstruction error {err:.3e} exceeds tolerance")
    return f
