from __future__ import annotations

import time

import numpy as np

from ..geometry import ChannelMatrix
from ..numerics import spmv, spmv_adjoint
from .common import BreakdownError, DetectionResult, DetectorParams, Tracker


def _normal_op(H: ChannelMatrix, v: np.ndarray) -> np.ndarray:
    return spmv_adjoint(H.matrix, spmv(H.matrix, v)) + H.ridge * v


def run_cg(H: ChannelMatrix, y, params: DetectorParams, x_ref, x0=None) -> DetectionResult:
    """Conjugate gradient on the regularized normal equations.

    H^H H is never formed; each iteration costs one spmv and one adjoint
    spmv. ``x0`` overrides the zero start (testing hook).
    """
    t0 = time.perf_counter()
    track = Tracker(x_ref, params)
    x = np.zeros(H.n_cols, dtype=np.complex128) if x0 is None else np.array(x0, dtype=np.complex128)
    r = spmv_adjoint(H.matrix, np.asarray(y, dtype=np.complex128)) - _normal_op(H, x)
    p = r.copy()
    rr = np.vdot(r, r).real
    done = track.record(x)
    while not done:
        if rr == 0.0:
            # exact solution reached; further steps are undefined
            break
        Ap = _normal_op(H, p)
        curv = np.vdot(p, Ap).real
        if not curv > 0.0:
            raise BreakdownError(f"zero curvature direction at iteration {track.t + 1}")
        alpha = rr / curv
        x = x + alpha * p
        r = r - alpha * Ap
        rr_new = np.vdot(r, r).real
        p = r + (rr_new / rr) * p
        rr = rr_new
        done = track.record(x)
    return track.result(x, time.perf_counter() - t0)
