"""Sparse assembly and direct solvers.

Storage is ``scipy.sparse.csr_matrix`` with canonical (sorted, unique)
column indices.  Every solve is checked a posteriori with an explicit
matrix-vector product and raises :class:`SolverError` when the relative
residual misses its tolerance.
"""

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

SPD_RTOL = 1e-12
INDEFINITE_RTOL = 1e-10
# iterative refinement sweeps allowed after the direct solve
REFINEMENT_STEPS = 3


class SolverError(RuntimeError):
    """Linear solve failed or missed its residual tolerance."""

    def __init__(self, message, residual=np.nan):
        super().__init__("{} (relative residual {:.3e})".format(message, residual))
        self.residual = residual


class TripletBuffer:
    """Accumulates (row, col, value) contributions; duplicates are summed
    on compression."""

    def __init__(self):
        self._rows = []
        self._cols = []
        self._vals = []

    def add(self, rows, cols, values):
        rows = np.atleast_1d(np.asarray(rows, dtype=np.int64)).ravel()
        cols = np.atleast_1d(np.asarray(cols, dtype=np.int64)).ravel()
        values = np.atleast_1d(np.asarray(values, dtype=float)).ravel()
        if not (rows.shape == cols.shape == values.shape):
            raise ValueError("rows, cols and values must have equal length")
        self._rows.append(rows)
        self._cols.append(cols)
        self._vals.append(values)

    def add_dense(self, idx, block):
        """Scatter a dense element block (..., k, k) at global indices (..., k)."""
        idx = np.asarray(idx, dtype=np.int64)
        k = idx.shape[-1]
        rows = np.broadcast_to(idx[..., :, None], idx.shape[:-1] + (k, k))
        cols = np.broadcast_to(idx[..., None, :], idx.shape[:-1] + (k, k))
        self.add(rows, cols, block)

    def arrays(self):
        if not self._rows:
            e = np.empty(0)
            return e.astype(np.int64), e.astype(np.int64), e
        return (np.concatenate(self._rows), np.concatenate(self._cols),
                np.concatenate(self._vals))

    def __len__(self):
        return sum(len(r) for r in self._rows)


def assemble_from_triplets(buf, n, m):
    """Compress ``buf`` into an ``n x m`` CSR matrix."""
    rows, cols, vals = buf.arrays()
    if rows.size and (rows.min() < 0 or rows.max() >= n
                      or cols.min() < 0 or cols.max() >= m):
        raise IndexError("triplet index out of bounds for shape ({}, {})".format(n, m))
    A = sp.coo_matrix((vals, (rows, cols)), shape=(n, m)).tocsr()
    A.sum_duplicates()
    A.sort_indices()
    return A


def is_symmetric(A, tol=1e-14):
    D = (A - A.T).tocoo()
    return D.nnz == 0 or float(np.abs(D.data).max()) <= tol


def relative_residual(A, x, b):
    nb = np.linalg.norm(b)
    r = np.linalg.norm(A @ x - b)
    return r / nb if nb > 0 else r


def _checked_solve(A, b, rtol, what):
    b = np.asarray(b, dtype=float)
    if not np.any(b):
        return np.zeros(A.shape[1] if b.ndim == 1 else (A.shape[1], b.shape[1]))
    try:
        lu = spla.splu(sp.csc_matrix(A))
    except RuntimeError as exc:
        raise SolverError("{}: factorization failed: {}".format(what, exc)) from exc
    x = lu.solve(b)
    if not np.all(np.isfinite(x)):
        raise SolverError("{}: non-finite solution".format(what))
    res = relative_residual(A, x, b)
    for _ in range(REFINEMENT_STEPS):
        if res <= rtol:
            break
        x = x + lu.solve(b - A @ x)
        res = relative_residual(A, x, b)
    if res > rtol:
        raise SolverError("{}: residual tolerance missed".format(what), res)
    return x


def solve_spd(A, b):
    """Solve ``A x = b`` for symmetric positive definite ``A``."""
    return _checked_solve(A, b, SPD_RTOL, "solve_spd")


def solve_symmetric_indefinite(A, b):
    """Solve ``A x = b`` for symmetric nonsingular, possibly indefinite ``A``."""
    return _checked_solve(A, b, INDEFINITE_RTOL, "solve_symmetric_indefinite")


class SPDFactor:
    """Reusable factorization of an SPD matrix for repeated solves."""

    def __init__(self, A):
        self.A = sp.csc_matrix(A)
        try:
            self._lu = spla.splu(self.A)
        except RuntimeError as exc:
            raise SolverError("factorization failed: {}".format(exc)) from exc

    def solve(self, B):
        B = np.asarray(B, dtype=float)
        X = self._lu.solve(B)
        res = np.linalg.norm(self.A @ X - B) / max(np.linalg.norm(B), 1e-300)
        if np.any(B) and res > SPD_RTOL:
            raise SolverError("SPDFactor.solve: residual tolerance missed", res)
        return X
