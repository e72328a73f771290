from __future__ import annotations

import numpy as np

from ..geometry import ChannelMatrix
from ..numerics import hermitian_solve, spmv_adjoint


def gram_matrix(H: ChannelMatrix) -> np.ndarray:
    """Dense H^H H + (noise_var / prior_var) I."""
    Hd = H.to_dense()
    return Hd.conj().T @ Hd + H.ridge * np.eye(H.n_cols)


def lmmse_direct(H: ChannelMatrix, y) -> np.ndarray:
    """Solve (H^H H + sigma^2/sigma_x^2 I) x = H^H y by Cholesky.

    This is the cubic-cost reference every iterative detector is measured
    against.
    """
    y = np.asarray(y, dtype=np.complex128)
    if not (H.noise_var > 0 and H.prior_var > 0):
        raise ValueError("noise_var and prior_var must be positive")
    return hermitian_solve(gram_matrix(H), spmv_adjoint(H.matrix, y))


def posterior_covariance(H: ChannelMatrix) -> np.ndarray:
    """(H^H H / sigma^2 + I / sigma_x^2)^-1, dense."""
    return np.linalg.inv(gram_matrix(H) / H.noise_var)
