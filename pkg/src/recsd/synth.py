"""Turning tree factors into elementary operations, and the compiler driver."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .generators import ab_blocks, pauli
from .matrix_core import DEFAULT_TOL, Tolerance, as_matrix, frobenius_dist, max_offdiag, num_bits
from .perm_search import BitPermutation, search_permutation
from .seo import SeoOp, SeoProgram, reconstruct
from .tree import ROTATION, CsdNode, CsdTree, build_tree, in_order_factors


BRANCH_EPS = 1e-12


def wrap_angle(a):
    """Map angles into ``(-pi, pi]``."""
    w = np.mod(np.asarray(a, dtype=float) + np.pi, 2 * np.pi) - np.pi
    # -pi and pi give the same phase; keep the branch deterministic near the cut
    return np.where(w <= -np.pi + BRANCH_EPS, w + 2 * np.pi, w)


def recognize_rotation_node(node: CsdNode, nb: int, tol: float = DEFAULT_TOL.diag_tol) -> list[SeoOp]:
    """A rotation node is a Y rotation on bit ``nb-1-depth``, multiplexed unless all angles agree.

    Nodes whose angles are all zero are the identity and emit nothing.
    """
    if node.kind != ROTATION:
        raise ValueError("recognize_rotation_node needs a rotation node")
    target = nb - 1 - node.depth
    angles = np.asarray(node.angles, dtype=float)
    if np.max(np.abs(angles)) <= tol:
        return []
    if np.ptp(angles) <= tol:
        return [SeoOp.roty(target, float(np.mean(angles)))]
    return [SeoOp.mroty(target, angles)]


def phase_polynomial(phases) -> np.ndarray:
    """Multilinear coefficients ``c[S]`` (``S`` a bit mask) with
    ``phi(x) = sum_S c[S] prod_{a in S} bit_a(x)``, each reduced into ``(-pi, pi]``.
    """
    c = np.array(phases, dtype=float)
    nb = num_bits(len(c)) if len(c) > 1 else 0
    x = np.arange(len(c))
    for a in range(nb):
        sel = (x >> a) & 1 == 1
        c[sel] -= c[x[sel] ^ (1 << a)]
    # integer multiples of 2 pi in any coefficient multiply a 0/1 monomial
    return wrap_angle(c)


def synth_diagonal(d, nb: int, tol: float = DEFAULT_TOL.diag_tol) -> list[SeoOp]:
    """Exact synthesis of a diagonal unitary as GPH plus multi-bit PHA terms."""
    d = np.asarray(d, dtype=complex)
    if d.ndim == 2:
        if max_offdiag(d) > tol:
            raise ValueError(f"matrix is not diagonal (max off-diagonal {max_offdiag(d):.3e})")
        d = np.diag(d)
    if len(d) != 2**nb:
        raise ValueError(f"diagonal of length {len(d)} does not match {nb} bits")
    coeffs = phase_polynomial(np.angle(d))
    ops = []
    if abs(coeffs[0]) > tol:
        ops.append(SeoOp.gph(float(coeffs[0])))
    masks = sorted(range(1, len(coeffs)), key=lambda m: (bin(m).count("1"), -m))
    for mask in masks:
        if abs(coeffs[mask]) > tol:
            bits = [a for a in range(nb) if mask >> a & 1]
            ops.append(SeoOp.pha(float(coeffs[mask]), bits))
    return ops


def transpositions(perm: BitPermutation) -> list[tuple[int, int]]:
    """Exchanges whose left-to-right matrix product is ``perm.matrix()``.

    A cycle ``a0 -> a1 -> ... -> a(m-1) -> a0`` becomes
    ``(a0, a(m-1)) ... (a0, a2) (a0, a1)``; cycles start at their smallest bit.
    """
    seen = set()
    out = []
    for start in range(perm.nb):
        if start in seen or perm.image[start] == start:
            seen.add(start)
            continue
        cycle = [start]
        seen.add(start)
        nxt = perm.image[start]
        while nxt != start:
            cycle.append(nxt)
            seen.add(nxt)
            nxt = perm.image[nxt]
        out += [(cycle[0], cycle[k]) for k in range(len(cycle) - 1, 0, -1)]
    return out


def synth_permutation(perm: BitPermutation) -> list[SeoOp]:
    """Each exchange of bits ``i, j`` becomes ``CNOT(i->j) CNOT(j->i) CNOT(i->j)``."""
    ops = []
    for i, j in transpositions(perm):
        ops += [SeoOp.cnot(i, j), SeoOp.cnot(j, i), SeoOp.cnot(i, j)]
    return ops


def peephole(ops: list[SeoOp]) -> list[SeoOp]:
    """Rewrite single-bit ``PHA(pi)`` as ``SIGZ``."""
    out = []
    for op in ops:
        if op.kind == "PHA" and not op.controls and abs(wrap_angle(op.params[0]) - np.pi) <= BRANCH_EPS:
            out.append(SeoOp("SIGZ", op.target))
        else:
            out.append(op)
    return out


def factor_ops(factor, nb: int, tol: Tolerance) -> list[SeoOp]:
    if isinstance(factor, BitPermutation):
        return synth_permutation(factor)
    if factor.kind == ROTATION:
        return recognize_rotation_node(factor, nb, tol.diag_tol)
    return synth_diagonal(factor.diagonal, nb, tol.diag_tol)


def tree_ops(tree: CsdTree, tol: Tolerance) -> list[SeoOp]:
    ops = []
    for factor in in_order_factors(tree):
        ops += factor_ops(factor, tree.nb, tol)
    return ops


@dataclass
class CompileOptions:
    direction: str = "downhill"
    permute: str = "root"  # none | root | all
    permute_side: str = "left"  # left | right | either
    tol: Tolerance = DEFAULT_TOL
    peephole: bool = True


@dataclass
class CompileResult:
    program: SeoProgram
    tree: CsdTree
    permutation: BitPermutation | None
    applied_side: str | None
    error: float


def _compile_downhill(u: np.ndarray, opts: CompileOptions) -> CompileResult:
    nb = num_bits(u.shape[0])
    perm, applied = None, None
    work = u
    if opts.permute in ("root", "all"):
        result = search_permutation(u, opts.permute_side, tol=opts.tol)
        # a permutation costs CNOTs, so it is only worth it when it stunts the CSD
        stunted = result.score.get(opts.permute_side) <= opts.tol.diag_tol
        if stunted and not result.permutation.is_identity():
            perm, applied = result.permutation, result.applied_side
            p = perm.matrix()
            work = u @ p if applied == "cols" else p @ u
    elif opts.permute != "none":
        raise ValueError(f"permute must be none, root or all, got {opts.permute!r}")
    tree = build_tree(work, "downhill", opts.tol, per_node_permute=opts.permute == "all")
    ops = tree_ops(tree, opts.tol)
    if perm is not None:
        undo = synth_permutation(perm.inverse())
        ops = ops + undo if applied == "cols" else undo + ops
    return CompileResult(SeoProgram(nb, tuple(ops)), tree, perm, applied, 0.0)


def compile_unitary(u, options: CompileOptions | None = None, **kwargs) -> CompileResult:
    """Compile a ``2**nb`` dimensional unitary into an SEO program.

    Optional root (or per-node) bit permutation, recursive CSD tree, then
    gate recognition of every in-order factor. ``direction='uphill'``
    compiles ``U^T`` downhill and transposes the program.
    """
    opts = options or CompileOptions(**kwargs)
    u = as_matrix(u)
    nb = num_bits(u.shape[0])
    if opts.direction == "uphill":
        res = _compile_downhill(u.T, opts)
        program = res.program.transposed()
        root = None if res.tree.root is None else res.tree.root.transposed()
        tree = CsdTree(nb, root, res.tree.initial.T, "uphill", opts.tol)
    elif opts.direction == "downhill":
        res = _compile_downhill(u, opts)
        program, tree = res.program, res.tree
    else:
        raise ValueError(f"direction must be 'downhill' or 'uphill', got {opts.direction!r}")
    ops = list(program.ops)
    if opts.peephole:
        ops = peephole(ops)
    metadata = {
        "direction": opts.direction,
        "permute": opts.permute,
        "permutation": "none" if res.permutation is None else ",".join(map(str, res.permutation.image)),
        "permutation_side": res.applied_side or "none",
        "tol": repr(opts.tol.diag_tol),
    }
    program = SeoProgram(nb, tuple(ops), metadata)
    error = frobenius_dist(reconstruct(program), u)
    return CompileResult(program, tree, res.permutation, res.applied_side, error)


def compile(u, options: CompileOptions | None = None, **kwargs) -> SeoProgram:  # noqa: A001
    """Shorthand for ``compile_unitary(...).program``."""
    return compile_unitary(u, options, **kwargs).program


# -- labels for factor sequences --------------------------------------------------


def _is_uniform(angles, value, tol=1e-10) -> bool:
    return bool(np.max(np.abs(np.asarray(angles) - value)) <= tol)


def factor_label(factor, nb: int, tol: float = 1e-10) -> str:
    """Short human label: ``D3^2``, ``(A2+B2)^2``, ``sz^8``, ``sz^x4``, ``R(3,2,1,0)``..."""
    if isinstance(factor, BitPermutation):
        return "R(" + ",".join(map(str, factor.image)) + ")"
    reps = 2**factor.depth
    power = "" if reps == 1 else f"^{reps}"
    if factor.kind == ROTATION:
        r = nb - factor.depth
        if _is_uniform(factor.angles, -np.pi / 4, tol):
            return f"D{r}{power}"
        if _is_uniform(factor.angles, np.pi / 4, tol):
            return f"DT{r}{power}"
        if np.ptp(factor.angles) <= tol:
            return f"Ry{nb - 1 - factor.depth}"
        return f"MRy{nb - 1 - factor.depth}"
    d = np.asarray(factor.diagonal)
    sz = np.diag(pauli("z"))
    if np.allclose(d, np.tile(sz, 2 ** (nb - 1)), atol=tol):
        return f"sz^{2 ** (nb - 1)}"
    ztensor = np.ones(1)
    for _ in range(nb):
        ztensor = np.kron(ztensor, sz)
    if np.allclose(d, ztensor, atol=tol):
        return f"sz^x{nb}"
    for r in range(1, nb):
        a, b = ab_blocks(r, nb)
        pattern = np.tile(np.concatenate([np.diag(a), np.diag(b)]), 2 ** (nb - 1 - r))
        if np.allclose(d, pattern, atol=tol):
            count = 2 ** (nb - 1 - r)
            return f"(A{r}+B{r})" + ("" if count == 1 else f"^{count}")
    return "Diag"


def factor_labels(tree: CsdTree) -> list[str]:
    return [factor_label(f, tree.nb) for f in in_order_factors(tree)]
