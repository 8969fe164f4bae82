"""Bit permutations that make the next CSD stunted."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .csd import csd
from .matrix_core import (
    DEFAULT_TOL,
    DimensionError,
    Tolerance,
    as_matrix,
    diagonal_blocks,
    direct_sum,
    is_diagonal,
    num_bits,
    split_blocks,
)

EXHAUSTIVE_MAX_BITS = 6
TIE_TOL = 1e-9


@dataclass(frozen=True)
class BitPermutation:
    """Bit ``alpha`` of the input is moved to bit ``image[alpha]``."""

    image: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "image", tuple(int(a) for a in self.image))
        if sorted(self.image) != list(range(len(self.image))):
            raise ValueError(f"{self.image} is not a permutation of 0..{len(self.image) - 1}")

    @property
    def nb(self) -> int:
        return len(self.image)

    @classmethod
    def identity(cls, nb: int) -> "BitPermutation":
        return cls(tuple(range(nb)))

    @classmethod
    def reversal(cls, nb: int) -> "BitPermutation":
        return cls(tuple(range(nb - 1, -1, -1)))

    def is_identity(self) -> bool:
        return self.image == tuple(range(self.nb))

    def inverse(self) -> "BitPermutation":
        inv = [0] * self.nb
        for a, b in enumerate(self.image):
            inv[b] = a
        return BitPermutation(tuple(inv))

    def extended(self, nb: int) -> "BitPermutation":
        """Same permutation on the low bits of a wider register."""
        return BitPermutation(self.image + tuple(range(self.nb, nb)))

    def apply_index(self, x):
        x = np.asarray(x)
        out = np.zeros_like(x)
        for a, b in enumerate(self.image):
            out |= ((x >> a) & 1) << b
        return out

    def matrix(self) -> np.ndarray:
        ns = 2**self.nb
        x = np.arange(ns)
        m = np.zeros((ns, ns), dtype=complex)
        m[self.apply_index(x), x] = 1
        return m


@dataclass(frozen=True)
class StuntScore:
    left_score: float
    right_score: float

    def get(self, side: str) -> float:
        if side == "left":
            return self.left_score
        if side == "right":
            return self.right_score
        if side == "either":
            return min(self.left_score, self.right_score)
        raise ValueError(f"unknown side {side!r}")


def _offdiag_l1(m: np.ndarray) -> float:
    return float(np.abs(m).sum() - np.abs(np.diag(m)).sum())


def stunt_score(u) -> StuntScore:
    """Off-diagonal L1 mass of the products that vanish for a stunted CSD.

    Left: ``U00 U10^dagger (+) U01 U11^dagger``. Right:
    ``U00^dagger U01 (+) U10^dagger U11``.
    """
    u00, u01, u10, u11 = split_blocks(u)
    left = _offdiag_l1(u00 @ u10.conj().T) + _offdiag_l1(u01 @ u11.conj().T)
    right = _offdiag_l1(u00.conj().T @ u01) + _offdiag_l1(u10.conj().T @ u11)
    return StuntScore(left, right)


def blockwise_score(m, nblocks: int) -> StuntScore:
    scores = [stunt_score(b) for b in diagonal_blocks(m, nblocks)]
    return StuntScore(sum(s.left_score for s in scores), sum(s.right_score for s in scores))


def chain_score(u, side: str = "left", tol: Tolerance = DEFAULT_TOL, bound: float = np.inf) -> float:
    """Stunt scores summed over every CSD a full recursive decomposition performs.

    Zero means every node of the tree is stunted on ``side``. The sum stops
    early once it exceeds ``bound``.
    """
    u = as_matrix(u)
    if side == "right":
        return chain_score(u.T, "left", tol, bound)
    nb = num_bits(u.shape[0])
    total = 0.0
    pending = [(u, 0)]
    while pending:
        m, depth = pending.pop()
        if depth >= nb or is_diagonal(m, tol.diag_tol):
            continue
        nblocks = 2**depth
        blocks = diagonal_blocks(m, nblocks)
        lefts, rights = [], []
        for b in blocks:
            s = stunt_score(b)
            total += s.get(side)
            if total > bound:
                return total
            f = csd(b, tol)
            lefts += [f.l0, f.l1]
            rights += [f.r0, f.r1]
        pending.append((direct_sum(*lefts), depth + 1))
        pending.append((direct_sum(*rights), depth + 1))
    return total


@dataclass(frozen=True)
class SearchResult:
    permutation: BitPermutation
    applied_side: str  # "cols" (U P) or "rows" (P U)
    score: StuntScore
    evaluated: int

    def __iter__(self):
        return iter((self.permutation, self.applied_side, self.score))


def _candidates(nb: int, mode: str):
    if mode == "exhaustive":
        return (BitPermutation(p) for p in itertools.permutations(range(nb)))
    raise ValueError(f"unknown mode {mode!r}")


def _apply(u, perm: BitPermutation, applied: str) -> np.ndarray:
    p = perm.matrix()
    return u @ p if applied == "cols" else p @ u


def _greedy(u, side: str, applied: str, nb: int):
    current = BitPermutation.identity(nb)
    best = stunt_score(_apply(u, current, applied)).get(side)
    evaluated = 1
    improved = True
    while improved:
        improved = False
        for i, j in itertools.combinations(range(nb), 2):
            img = list(current.image)
            img[i], img[j] = img[j], img[i]
            cand = BitPermutation(tuple(img))
            s = stunt_score(_apply(u, cand, applied)).get(side)
            evaluated += 1
            if s < best - TIE_TOL:
                current, best, improved = cand, s, True
    return [(best, current)], evaluated


def search_permutation(
    u,
    side: str = "left",
    mode: str | None = None,
    tol: Tolerance = DEFAULT_TOL,
) -> SearchResult:
    """Bit permutation minimising the stunt score of ``U P`` (or ``P U``).

    Exhaustive over all ``nb!`` permutations up to six bits, greedy pairwise
    swaps beyond. Candidates tied on the root score are separated by
    :func:`chain_score`, then by lexicographic image. Column application
    wins ties between the two sides.
    """
    u = as_matrix(u)
    nb = num_bits(u.shape[0])
    if side not in ("left", "right", "either"):
        raise ValueError(f"unknown side {side!r}")
    if mode is None:
        mode = "exhaustive" if nb <= EXHAUSTIVE_MAX_BITS else "greedy"
    if mode == "exhaustive" and nb > EXHAUSTIVE_MAX_BITS + 2:
        raise DimensionError(f"exhaustive search over {nb}! permutations is too large")

    evaluated = 0
    best = None
    for applied in ("cols", "rows"):
        if mode == "greedy":
            scored, n = _greedy(u, side, applied, nb)
        else:
            scored = []
            for perm in _candidates(nb, mode):
                scored.append((stunt_score(_apply(u, perm, applied)).get(side), perm))
            n = len(scored)
        evaluated += n
        lowest = min(s for s, _ in scored)
        tied = sorted(((s, p) for s, p in scored if s <= lowest + TIE_TOL), key=lambda sp: sp[1].image)
        s, perm = tied[0] if len(tied) == 1 else _break_tie(u, tied, applied, side, tol)
        if best is None or s < best[0] - TIE_TOL:
            best = (s, applied, perm)
        if best[0] <= TIE_TOL:
            # rows would have to be strictly better than zero
            break
    s, applied, perm = best
    return SearchResult(perm, applied, stunt_score(_apply(u, perm, applied)), evaluated)


def _chain(u, perm, applied, side, tol, bound=np.inf):
    m = _apply(u, perm, applied)
    if side == "either":
        return min(chain_score(m, "left", tol, bound), chain_score(m, "right", tol, bound))
    return chain_score(m, side, tol, bound)


def _break_tie(u, tied, applied, side, tol):
    """Lowest chain score among root-tied candidates, first image on ties."""
    best, best_key = None, np.inf
    for s, perm in tied:
        key = round(_chain(u, perm, applied, side, tol, best_key * TIE_TOL + TIE_TOL) / TIE_TOL)
        if key < best_key:
            best, best_key = (s, perm), key
        if best_key == 0:
            break
    return best
