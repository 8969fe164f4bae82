"""Recursive CSD trees.

A rotation node at depth ``d`` holds the angles of ``2**d`` D-blocks, one
per diagonal block of its incoming matrix. Its children carry the
direct sums of all left (resp. right) CSD factors. Diagonal children become
black nodes; children equal to the identity are dropped.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .csd import NotUnitaryError, csd, d_block
from .matrix_core import (
    DEFAULT_TOL,
    Tolerance,
    as_matrix,
    diagonal_blocks,
    direct_sum,
    identity,
    is_diagonal,
    is_identity,
    is_unitary,
    max_offdiag,
    num_bits,
    unitarity_residual,
)
from .perm_search import BitPermutation, blockwise_score

ROTATION = "rotation"
BLACK = "black"


@dataclass
class CsdNode:
    depth: int
    kind: str
    nb: int
    angles: np.ndarray | None = None  # rotation nodes
    diagonal: np.ndarray | None = None  # black nodes, the diagonal entries
    left: "CsdNode | None" = None
    right: "CsdNode | None" = None
    # permutation factors emitted before the left subtree / after the right subtree
    pre_perm: BitPermutation | None = None
    post_perm: BitPermutation | None = None
    # off-diagonal mass dropped when a child was declared diagonal
    dropped_offdiag: float = 0.0

    @property
    def nblocks(self) -> int:
        return 2**self.depth

    def matrix(self) -> np.ndarray:
        if self.kind == BLACK:
            return np.diag(self.diagonal).astype(complex)
        return rotation_matrix(self.angles, self.nb, self.depth)

    def transposed(self) -> "CsdNode":
        """Node of the transpose-dual tree: matrices transposed, children swapped."""
        return CsdNode(
            depth=self.depth,
            kind=self.kind,
            nb=self.nb,
            angles=None if self.angles is None else -self.angles,
            diagonal=self.diagonal,
            dropped_offdiag=self.dropped_offdiag,
            left=None if self.right is None else self.right.transposed(),
            right=None if self.left is None else self.left.transposed(),
            pre_perm=None if self.post_perm is None else self.post_perm.inverse(),
            post_perm=None if self.pre_perm is None else self.pre_perm.inverse(),
        )

    def iter_nodes(self):
        if self.left is not None:
            yield from self.left.iter_nodes()
        yield self
        if self.right is not None:
            yield from self.right.iter_nodes()


@dataclass
class CsdTree:
    nb: int
    root: CsdNode | None
    initial: np.ndarray
    direction: str = "downhill"
    tol: Tolerance = field(default=DEFAULT_TOL)

    def nodes(self) -> list[CsdNode]:
        return [] if self.root is None else list(self.root.iter_nodes())

    def rotation_nodes(self) -> list[CsdNode]:
        return [n for n in self.nodes() if n.kind == ROTATION]

    def black_nodes(self) -> list[CsdNode]:
        return [n for n in self.nodes() if n.kind == BLACK]


def rotation_matrix(angles, nb: int, depth: int) -> np.ndarray:
    angles = np.asarray(angles, dtype=float)
    per_block = 2 ** (nb - depth - 1)
    return direct_sum(*[d_block(angles[k * per_block:(k + 1) * per_block]) for k in range(2**depth)])


def _search_low_bits(m, depth: int, nb: int, tol: float):
    """Column permutation of the low ``nb - depth`` bits that makes every block left-stunted."""
    width = nb - depth
    base = blockwise_score(m, 2**depth).left_score
    if base <= tol:
        return None
    best, best_perm = base, None
    for img in itertools.permutations(range(width)):
        perm = BitPermutation(img)
        if perm.is_identity():
            continue
        full = perm.extended(nb)
        score = blockwise_score(m @ full.matrix(), 2**depth).left_score
        if score < best - 1e-9:
            best, best_perm = score, full
    return best_perm if best <= tol else None


def _child(m: np.ndarray, depth: int, nb: int, tol: Tolerance, per_node: bool):
    if is_identity(m, tol.diag_tol):
        return None
    if depth >= nb or is_diagonal(m, tol.diag_tol):
        return CsdNode(depth=depth, kind=BLACK, nb=nb, diagonal=np.diag(m).copy(), dropped_offdiag=max_offdiag(m))
    return _build(m, depth, nb, tol, per_node)


def _build(m: np.ndarray, depth: int, nb: int, tol: Tolerance, per_node: bool) -> CsdNode:
    post = None
    if per_node and depth > 0 and nb - depth > 1:
        perm = _search_low_bits(m, depth, nb, tol.diag_tol)
        if perm is not None:
            m = m @ perm.matrix()
            post = perm.inverse()
    lefts, rights, angles = [], [], []
    for block in diagonal_blocks(m, 2**depth):
        f = csd(block, tol)
        lefts += [f.l0, f.l1]
        rights += [f.r0, f.r1]
        angles.append(f.theta)
    node = CsdNode(depth=depth, kind=ROTATION, nb=nb, angles=np.concatenate(angles), post_perm=post)
    node.left = _child(direct_sum(*lefts), depth + 1, nb, tol, per_node)
    node.right = _child(direct_sum(*rights), depth + 1, nb, tol, per_node)
    return node


def build_tree(u, direction: str = "downhill", tol: Tolerance = DEFAULT_TOL, per_node_permute: bool = False) -> CsdTree:
    """Recursively CSD-decompose a ``2**nb`` dimensional unitary.

    ``direction='uphill'`` builds the downhill tree of ``U^T`` and
    transposes it, so the in-order factor list is the reversed list of
    transposed factors.
    """
    u = as_matrix(u)
    nb = num_bits(u.shape[0])
    if not is_unitary(u, tol.unitary_tol):
        raise NotUnitaryError(unitarity_residual(u), u.shape[0])
    if direction == "uphill":
        down = build_tree(u.T, "downhill", tol, per_node_permute)
        root = None if down.root is None else down.root.transposed()
        return CsdTree(nb, root, u, "uphill", tol)
    if direction != "downhill":
        raise ValueError(f"direction must be 'downhill' or 'uphill', got {direction!r}")
    return CsdTree(nb, _child(u, 0, nb, tol, per_node_permute), u, "downhill", tol)


def in_order_factors(tree: CsdTree) -> list:
    """Nodes and permutations in in-order (left subtree, node, right subtree)."""
    out: list = []

    def visit(node: CsdNode | None):
        if node is None:
            return
        if node.pre_perm is not None:
            out.append(node.pre_perm)
        visit(node.left)
        out.append(node)
        visit(node.right)
        if node.post_perm is not None:
            out.append(node.post_perm)

    visit(tree.root)
    return out


def factor_matrix(factor) -> np.ndarray:
    return factor.matrix()


def in_order(tree: CsdTree) -> list[np.ndarray]:
    """Dense factor matrices whose left-to-right product is ``tree.initial``."""
    return [factor_matrix(f) for f in in_order_factors(tree)]


def product(mats, dim: int) -> np.ndarray:
    out = identity(dim)
    for m in mats:
        out = out @ m
    return out


def dump_tree(tree: CsdTree) -> str:
    """One line per node: depth, kind, block count, and max off-diagonal of black nodes."""
    lines = [f"# tree nb={tree.nb} direction={tree.direction}"]

    def visit(node, indent):
        if node is None:
            return
        if node.kind == ROTATION:
            spread = float(np.ptp(node.angles))
            lines.append(f"{'  ' * indent}depth={node.depth} kind=rotation blocks={node.nblocks} angle_spread={spread:.3e}")
        else:
            lines.append(
                f"{'  ' * indent}depth={node.depth} kind=black blocks={node.nblocks} max_offdiag={node.dropped_offdiag:.3e}"
            )
        visit(node.left, indent + 1)
        visit(node.right, indent + 1)

    visit(tree.root, 0)
    return "\n".join(lines)
