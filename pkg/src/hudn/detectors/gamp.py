from __future__ import annotations

import time

import numpy as np

from ..geometry import ChannelMatrix
from ..numerics import spmv, spmv_adjoint
from .common import DetectionResult, DetectorParams, DivergenceError, Tracker


def run_gamp(H: ChannelMatrix, y, params: DetectorParams, x_ref) -> DetectionResult:
    """Scalar-variance GAMP for a Gaussian prior and AWGN output channel.

    Every fixed point satisfies the LMMSE normal equations, whatever the
    scalar variances settle to.
    """
    t0 = time.perf_counter()
    track = Tracker(x_ref, params)
    y = np.asarray(y, dtype=np.complex128)
    N, K = H.n_rows, H.n_cols
    fro = H.matrix.frobenius_sq()
    sx2, s2 = H.prior_var, H.noise_var

    xhat = np.zeros(K, dtype=np.complex128)
    tau_x = sx2
    s = np.zeros(N, dtype=np.complex128)
    done = track.record(xhat)
    while not done:
        with np.errstate(over="ignore", invalid="ignore"):
            xhat, tau_x, s = _step(H, y, xhat, tau_x, s, fro, sx2, s2)
        if not (np.isfinite(tau_x) and tau_x > 0 and np.all(np.isfinite(xhat))):
            raise DivergenceError(
                f"GAMP variance or estimate invalid at iteration {track.t + 1}",
                track.trajectory,
                track.t,
            )
        done = track.record(xhat)
    return track.result(xhat, time.perf_counter() - t0)


def _step(H, y, xhat, tau_x, s, fro, sx2, s2):
    N, K = H.n_rows, H.n_cols
    tau_p = fro / N * tau_x
    p = spmv(H.matrix, xhat) - tau_p * s
    s = (y - p) / (s2 + tau_p)
    tau_r = 1.0 / (fro / K / (s2 + tau_p))
    r = xhat + tau_r * spmv_adjoint(H.matrix, s)
    xhat = sx2 / (sx2 + tau_r) * r
    tau_x = sx2 * tau_r / (sx2 + tau_r)
    return xhat, tau_x, s
