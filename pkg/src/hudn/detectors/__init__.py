import time

from .admm import LocalSolveError, run_admm
from .cg import run_cg
from .common import (
    ALGOS,
    SCHEDULES,
    BreakdownError,
    DetectionResult,
    DetectorParams,
    DivergenceError,
    iterations_to_tol,
    relative_error,
)
from .gamp import run_gamp
from .lmmse import gram_matrix, lmmse_direct, posterior_covariance
from .message_passing import FactorGraph, build_factor_graph, run_gaussian_bp


def run_detector(H, y, params: DetectorParams, x_ref) -> DetectionResult:
    """Dispatch on ``params.algo``."""
    if params.algo == "lmmse":
        t0 = time.perf_counter()
        x = lmmse_direct(H, y)
        return DetectionResult(
            estimate=x,
            trajectory=[relative_error(x, x_ref)],
            converged=True,
            iterations=0,
            wall_time=time.perf_counter() - t0,
        )
    if params.algo == "mp":
        return run_gaussian_bp(build_factor_graph(H), y, H.noise_var, H.prior_var, params, x_ref)
    if params.algo == "cg":
        return run_cg(H, y, params, x_ref)
    if params.algo == "gamp":
        return run_gamp(H, y, params, x_ref)
    return run_admm(H, y, params, x_ref)


__all__ = [
    "ALGOS",
    "SCHEDULES",
    "BreakdownError",
    "DetectionResult",
    "DetectorParams",
    "DivergenceError",
    "FactorGraph",
    "LocalSolveError",
    "build_factor_graph",
    "gram_matrix",
    "iterations_to_tol",
    "lmmse_direct",
    "posterior_covariance",
    "relative_error",
    "run_admm",
    "run_cg",
    "run_detector",
    "run_gamp",
    "run_gaussian_bp",
]
