from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ALGOS = ("lmmse", "mp", "cg", "gamp", "admm")
SCHEDULES = ("sync", "damped", "random_async")
REF_NORM_FLOOR = 1e-12


class DivergenceError(ArithmeticError):
    """An iterate went non-finite; ``trajectory`` holds the finite prefix."""

    def __init__(self, msg: str, trajectory=(), iterations: int = 0):
        super().__init__(msg)
        self.trajectory = list(trajectory)
        self.iterations = iterations


class BreakdownError(ArithmeticError):
    pass


@dataclass
class DetectorParams:
    algo: str = "mp"
    schedule: str = "random_async"
    damping_beta: float = 0.5
    max_iter: int = 500
    tol: float = 1e-4
    rho: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.algo not in ALGOS:
            raise ValueError(f"unknown algo {self.algo!r}")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"unknown schedule {self.schedule!r}")
        if not 0.0 < self.damping_beta <= 1.0:
            raise ValueError("damping_beta must lie in (0, 1]")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not self.rho > 0:
            raise ValueError("rho must be positive")

    @property
    def label(self) -> str:
        return f"{self.algo}-{self.schedule}" if self.algo == "mp" else self.algo


@dataclass
class DetectionResult:
    estimate: np.ndarray
    trajectory: list = field(default_factory=list)  # e(0) .. e(T)
    converged: bool = False
    iterations: int = 0
    wall_time: float = 0.0
    variances: np.ndarray | None = None  # belief variances (message passing only)


def relative_error(xhat, x_ref) -> float:
    """||xhat - x_ref|| / ||x_ref||; falls back to ||xhat|| when x_ref is
    (numerically) zero."""
    xhat = np.asarray(xhat)
    x_ref = np.asarray(x_ref)
    if xhat.shape != x_ref.shape:
        raise ValueError(f"length mismatch: {xhat.shape} vs {x_ref.shape}")
    # a diverging iterate may overflow the norm; the caller sees inf and reports it
    with np.errstate(over="ignore", invalid="ignore"):
        ref = float(np.linalg.norm(x_ref))
        if ref < REF_NORM_FLOOR:
            return float(np.linalg.norm(xhat))
        return float(np.linalg.norm(xhat - x_ref)) / ref


def iterations_to_tol(traj, tol: float) -> int | None:
    """First index t with traj[t] <= tol, or None if never reached."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    for t, e in enumerate(traj):
        if e <= tol:
            return t
    return None


class Tracker:
    """Records e(t) and applies the shared stop rule."""

    def __init__(self, x_ref, params: DetectorParams):
        self.x_ref = np.asarray(x_ref)
        self.tol = params.tol
        self.max_iter = params.max_iter
        self.trajectory: list[float] = []

    def record(self, x) -> bool:
        """Append e(t); True when iteration should stop."""
        e = relative_error(x, self.x_ref)
        if not np.isfinite(e):
            raise DivergenceError(
                "relative error is not finite", self.trajectory, len(self.trajectory) - 1
            )
        self.trajectory.append(e)
        return e <= self.tol or len(self.trajectory) > self.max_iter

    @property
    def t(self) -> int:
        return len(self.trajectory) - 1

    def result(self, x, wall_time: float, **extra) -> DetectionResult:
        return DetectionResult(
            estimate=np.asarray(x),
            trajectory=list(self.trajectory),
            converged=self.trajectory[-1] <= self.tol,
            iterations=self.t,
            wall_time=wall_time,
            **extra,
        )
