"""Recursive cosine-sine decomposition compiler for n-qubit unitaries."""

from .csd import CsdFactors, NotUnitaryError, csd, csd_try_stunted
from .estimator import ReCSDCompiler
from .generators import GENERATORS, bit_reversal, dft, hadamard_n, random_unitary
from .matrix_core import DEFAULT_TOL, DimensionError, Tolerance, read_cmat, write_cmat
from .perm_search import BitPermutation, search_permutation, stunt_score
from .seo import SeoOp, SeoProgram, apply_state, read_seo, reconstruct, stats, write_seo
from .synth import CompileOptions, CompileResult, compile, compile_unitary, synth_diagonal
from .tree import CsdTree, build_tree, in_order

__all__ = [
    "BitPermutation",
    "CompileOptions",
    "CompileResult",
    "CsdFactors",
    "CsdTree",
    "DEFAULT_TOL",
    "DimensionError",
    "GENERATORS",
    "NotUnitaryError",
    "ReCSDCompiler",
    "SeoOp",
    "SeoProgram",
    "Tolerance",
    "apply_state",
    "bit_reversal",
    "build_tree",
    "compile",
    "compile_unitary",
    "csd",
    "csd_try_stunted",
    "dft",
    "hadamard_n",
    "in_order",
    "random_unitary",
    "read_cmat",
    "read_seo",
    "reconstruct",
    "search_permutation",
    "stats",
    "stunt_score",
    "synth_diagonal",
    "write_cmat",
    "write_seo",
]
