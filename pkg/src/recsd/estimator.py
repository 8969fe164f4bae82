"""scikit-learn flavoured front end to the compiler."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .matrix_core import Tolerance
from .seo import apply_state
from .synth import CompileOptions, compile_unitary
from .validation import check_state_batch, check_unitary


class ReCSDCompiler(BaseEstimator, TransformerMixin):
    """Compile a unitary with ``fit``; ``transform`` runs the compiled circuit.

    Rows of ``X`` passed to ``transform`` are state vectors. The result is
    ``X @ U.T``, computed gate by gate from the SEO program rather than
    from the dense matrix.
    """

    def __init__(self, direction="downhill", permute="root", permute_side="left", tol=1e-10, peephole=True):
        self.direction = direction
        self.permute = permute
        self.permute_side = permute_side
        self.tol = tol
        self.peephole = peephole

    def _options(self) -> CompileOptions:
        tol = Tolerance(diag_tol=self.tol, unitary_tol=self.tol)
        return CompileOptions(self.direction, self.permute, self.permute_side, tol, self.peephole)

    def fit(self, U, y=None):
        opts = self._options()
        u = check_unitary(U, opts.tol.unitary_tol)
        result = compile_unitary(u, opts)
        self.program_ = result.program
        self.tree_ = result.tree
        self.permutation_ = result.permutation
        self.reconstruction_error_ = result.error
        self.n_qubits_ = result.program.nb
        return self

    def transform(self, X):
        check_is_fitted(self, "program_")
        states = check_state_batch(X, self.n_qubits_)
        return np.array([apply_state(self.program_, psi) for psi in states])

    def inverse_transform(self, X):
        check_is_fitted(self, "program_")
        states = check_state_batch(X, self.n_qubits_)
        inv = self.program_.inverse()
        return np.array([apply_state(inv, psi) for psi in states])
