"""Sparse complex matrix primitives and a dense Hermitian solver.

Accumulation orders are fixed (row-major for ``spmv``, ascending column
buckets for ``spmv_adjoint``) so repeated calls are bit-identical.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DimensionError(ValueError):
    pass


class FactorizationError(np.linalg.LinAlgError):
    """Cholesky hit a non-positive pivot."""

    def __init__(self, pivot: int, value: float):
        super().__init__(f"non-positive pivot {value!r} at index {pivot}")
        self.pivot = pivot
        self.value = value


@dataclass(frozen=True)
class SparseComplexMatrix:
    """CSR storage for a complex matrix."""

    n_rows: int
    n_cols: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        offs = np.asarray(self.row_offsets, dtype=np.int64)
        cols = np.asarray(self.col_indices, dtype=np.int64)
        vals = np.asarray(self.values, dtype=np.complex128)
        object.__setattr__(self, "row_offsets", offs)
        object.__setattr__(self, "col_indices", cols)
        object.__setattr__(self, "values", vals)
        if offs.shape != (self.n_rows + 1,) or offs[0] != 0 or offs[-1] != cols.size:
            raise ValueError("row_offsets must have length n_rows+1 and span col_indices")
        if np.any(np.diff(offs) < 0):
            raise ValueError("row_offsets must be nondecreasing")
        if cols.size != vals.size:
            raise ValueError("col_indices and values differ in length")
        if cols.size and (cols.min() < 0 or cols.max() >= self.n_cols):
            raise ValueError("column index out of range")
        for n in range(self.n_rows):
            seg = cols[offs[n]:offs[n + 1]]
            if np.any(np.diff(seg) <= 0):
                raise ValueError(f"row {n}: column indices not strictly increasing")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @property
    def nnz(self) -> int:
        return int(self.col_indices.size)

    def row(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.row_offsets[n], self.row_offsets[n + 1]
        return self.col_indices[lo:hi], self.values[lo:hi]

    def row_ids(self) -> np.ndarray:
        """Row index of every stored entry, in storage order."""
        return np.repeat(np.arange(self.n_rows), np.diff(self.row_offsets))

    def frobenius_sq(self) -> float:
        return float(np.sum(self.values.real ** 2 + self.values.imag ** 2))

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.complex128)
        out[self.row_ids(), self.col_indices] = self.values
        return out

    @classmethod
    def from_dense(cls, dense, keep=None) -> "SparseComplexMatrix":
        """Build from a dense array; ``keep`` is an optional boolean mask
        (default: nonzero entries)."""
        dense = np.asarray(dense, dtype=np.complex128)
        if dense.ndim != 2:
            raise ValueError("expected a 2-D array")
        mask = dense != 0 if keep is None else np.asarray(keep, dtype=bool)
        rows, cols = np.nonzero(mask)  # row-major order, columns ascending
        offs = np.zeros(dense.shape[0] + 1, dtype=np.int64)
        np.add.at(offs, rows + 1, 1)
        return cls(dense.shape[0], dense.shape[1], np.cumsum(offs), cols, dense[rows, cols])

    @classmethod
    def identity(cls, n: int) -> "SparseComplexMatrix":
        return cls(n, n, np.arange(n + 1), np.arange(n), np.ones(n, dtype=np.complex128))


def _as_vector(v, n: int, what: str) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim != 1 or v.size != n:
        raise DimensionError(f"{what}: expected vector of length {n}, got shape {v.shape}")
    return v


def spmv(A: SparseComplexMatrix, v) -> np.ndarray:
    """A @ v, accumulated row by row in storage order."""
    v = _as_vector(v, A.n_cols, "spmv")
    prod = A.values * v[A.col_indices]
    out = np.zeros(A.n_rows, dtype=np.complex128)
    # np.add.at applies updates in index order, i.e. row-major storage order
    np.add.at(out, A.row_ids(), prod)
    return out


def spmv_adjoint(A: SparseComplexMatrix, v) -> np.ndarray:
    """A^H @ v, accumulated per column with rows in ascending order."""
    v = _as_vector(v, A.n_rows, "spmv_adjoint")
    rows = A.row_ids()
    prod = np.conj(A.values) * v[rows]
    # stable sort by column keeps ascending row order inside each bucket
    order = np.argsort(A.col_indices, kind="stable")
    out = np.zeros(A.n_cols, dtype=np.complex128)
    np.add.at(out, A.col_indices[order], prod[order])
    return out


def cholesky(M, herm_tol: float = 1e-12) -> np.ndarray:
    """Lower-triangular L with M = L L^H (column-oriented Cholesky)."""
    M = np.array(M, dtype=np.complex128)
    n = M.shape[0]
    if M.shape != (n, n):
        raise DimensionError(f"expected a square matrix, got {M.shape}")
    scale = max(float(np.max(np.abs(M))), 1.0) if n else 1.0
    if n and np.max(np.abs(M - M.conj().T)) > herm_tol * scale:
        raise ValueError("matrix is not Hermitian")
    L = np.zeros_like(M)
    for j in range(n):
        d = M[j, j].real - np.sum(np.abs(L[j, :j]) ** 2)
        if not d > 0.0:
            raise FactorizationError(j, float(d))
        L[j, j] = np.sqrt(d)
        if j + 1 < n:
            L[j + 1:, j] = (M[j + 1:, j] - L[j + 1:, :j] @ np.conj(L[j, :j])) / L[j, j]
    return L


def cholesky_solve(L: np.ndarray, b) -> np.ndarray:
    """Solve L L^H x = b by forward then backward substitution."""
    n = L.shape[0]
    b = _as_vector(b, n, "cholesky_solve")
    z = np.zeros(n, dtype=np.complex128)
    for i in range(n):
        z[i] = (b[i] - L[i, :i] @ z[:i]) / L[i, i]
    x = np.zeros(n, dtype=np.complex128)
    for i in range(n - 1, -1, -1):
        x[i] = (z[i] - np.conj(L[i + 1:, i]) @ x[i + 1:]) / np.conj(L[i, i])
    return x


def hermitian_solve(M, b) -> np.ndarray:
    """Solve M x = b for Hermitian positive-definite M.

    Raises FactorizationError (with the failing pivot index) when M is not
    positive definite.
    """
    return cholesky_solve(cholesky(M), b)
