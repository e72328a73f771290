"""Seeded Monte Carlo trials, network-size sweeps and CSV reports.

Trial ``t`` uses seed ``base_seed + t`` for its layout, channels, symbols,
noise and schedule randomness, so every row can be regenerated alone.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..detectors import (
    BreakdownError,
    DetectionResult,
    DetectorParams,
    DivergenceError,
    iterations_to_tol,
    lmmse_direct,
    run_detector,
)
from ..geometry import (
    ChannelMatrix,
    DegenerateTopologyError,
    NetworkTopology,
    ScenarioConfig,
    sample_topology,
    synth_channels,
)
from ..numerics import spmv
from .config import ExperimentConfig

TRAJECTORY_HEADER = ["algo", "schedule", "seed", "iter", "rel_err"]
SWEEP_HEADER = ["algo", "schedule", "area_km2", "n_aps", "n_users", "trial", "iters_to_tol", "diverged"]
SUMMARY_HEADER = ["algo", "schedule", "area_km2", "median_iters", "p90_iters", "divergence_rate"]
NOT_REACHED = "not-reached"


@dataclass
class Instance:
    topology: NetworkTopology
    H: ChannelMatrix
    x: np.ndarray
    y: np.ndarray
    x_ref: np.ndarray


@dataclass
class Run:
    params: DetectorParams
    seed: int
    trajectory: list
    iters_to_tol: int | None
    diverged: bool
    wall_time: float
    n_aps: int = 0
    n_users: int = 0


@dataclass
class SweepRow:
    algo: str
    schedule: str
    area_km2: float
    n_aps: int
    n_users: int
    trial: int
    iters_to_tol: int | None
    diverged: bool
    wall_time: float


@dataclass
class SweepReport:
    rows: list = field(default_factory=list)


def schedule_name(p: DetectorParams) -> str:
    return p.schedule if p.algo == "mp" else "none"


def fmt(v) -> str:
    """Shortest round-trip decimal; None/inf become 'not-reached'."""
    if v is None or (isinstance(v, float) and np.isinf(v)):
        return NOT_REACHED
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _cn(rng: np.random.Generator, n: int, var: float) -> np.ndarray:
    return np.sqrt(var / 2.0) * (rng.standard_normal(n) + 1j * rng.standard_normal(n))


def make_instance(scenario: ScenarioConfig, seed: int) -> Instance:
    topo = sample_topology(scenario, seed)
    H = synth_channels(topo, scenario, seed)
    x = _cn(np.random.default_rng([seed, 2]), H.n_cols, H.prior_var)
    noise = _cn(np.random.default_rng([seed, 3]), H.n_rows, H.noise_var)
    y = spmv(H.matrix, x) + noise
    return Instance(topo, H, x, y, lmmse_direct(H, y))


def run_one(inst: Instance, params: DetectorParams, seed: int) -> Run:
    """One detector on one instance; divergence is recorded, not raised."""
    params = dataclasses.replace(params, seed=seed)
    counts = dict(n_aps=inst.H.n_rows, n_users=inst.H.n_cols)
    try:
        res: DetectionResult = run_detector(inst.H, inst.y, params, inst.x_ref)
    except (DivergenceError, BreakdownError) as exc:
        return Run(params, seed, list(getattr(exc, "trajectory", [])), None, True, 0.0, **counts)
    iters = iterations_to_tol(res.trajectory, params.tol)
    return Run(params, seed, res.trajectory, iters, False, res.wall_time, **counts)


def run_trial(scenario: ScenarioConfig, detectors, seed: int) -> list[Run]:
    try:
        inst = make_instance(scenario, seed)
    except DegenerateTopologyError as exc:
        raise DegenerateTopologyError(f"trial seed {seed}: {exc}") from exc
    return [run_one(inst, p, seed) for p in detectors]


def _run_trials(scenario: ScenarioConfig, config: ExperimentConfig) -> list[list[Run]]:
    seeds = [config.base_seed + t for t in range(config.trials)]
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            # map() yields in submission order, so output is interleaving-free
            return list(pool.map(run_trial, [scenario] * len(seeds), [config.detectors] * len(seeds), seeds))
    return [run_trial(scenario, config.detectors, s) for s in seeds]


def trajectory_rows(trials: list[list[Run]]):
    for runs in trials:
        for run in runs:
            for t, e in enumerate(run.trajectory):
                yield [run.params.algo, schedule_name(run.params), run.seed, t, repr(float(e))]


def write_csv(rows, header, path=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    text = buf.getvalue()
    if path is not None:
        try:
            with open(path, "w", newline="", encoding="utf-8") as f:
                f.write(text)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
    return text


def run_scenario(config: ExperimentConfig, path=None) -> str:
    """All detectors over all trials; returns (and optionally writes) the trajectory CSV."""
    trials = _run_trials(config.scenario, config)
    return write_csv(trajectory_rows(trials), TRAJECTORY_HEADER, path)


def scenario_for_area(config: ExperimentConfig, area: float) -> ScenarioConfig:
    base = config.scenario
    if config.poisson_sweep:
        return dataclasses.replace(base, mode="poisson", area=area)
    return dataclasses.replace(
        base,
        mode="fixed-count",
        area=area,
        n_aps=max(1, int(round(base.ap_density * area))),
        n_users=max(1, int(round(base.user_density * area))),
    )


def sweep_network_size(config: ExperimentConfig) -> SweepReport:
    """Repeat the trial set at each area with densities held fixed."""
    if not config.areas:
        raise ValueError("sweep needs a nonempty areas list")
    if not config.detectors:
        raise ValueError("sweep needs at least one detector")
    report = SweepReport()
    for area in config.areas:
        scenario = scenario_for_area(config, area)
        for t, runs in enumerate(_run_trials(scenario, config)):
            for run in runs:
                report.rows.append(
                    SweepRow(
                        run.params.algo,
                        schedule_name(run.params),
                        float(area),
                        run.n_aps,
                        run.n_users,
                        t,
                        run.iters_to_tol,
                        run.diverged,
                        run.wall_time,
                    )
                )
    return report


def _iters_value(v) -> float:
    return float("inf") if v is None else float(v)


def summarize(report: SweepReport) -> list[list]:
    groups: dict = {}
    for r in report.rows:
        groups.setdefault((r.area_km2, r.algo, r.schedule), []).append(r)
    out = []
    for (area, algo, schedule), rows in groups.items():
        iters = np.array([_iters_value(r.iters_to_tol) for r in rows])
        med = float(np.median(iters))
        # nearest-rank percentile: no interpolation across not-reached (inf) values
        p90 = float(np.percentile(iters, 90, method="inverted_cdf"))
        div = sum(r.diverged for r in rows) / len(rows)
        out.append([algo, schedule, fmt(area), fmt(med), fmt(p90), fmt(div)])
    return out


def emit_reports(report: SweepReport, path) -> dict:
    """Write sweep.csv, summary.csv and timing.csv into directory ``path``.

    sweep.csv and summary.csv are deterministic; wall times are kept apart
    in timing.csv.
    """
    if not report.rows:
        raise ValueError("report is empty")
    os.makedirs(path, exist_ok=True)
    files = {
        "sweep": os.path.join(path, "sweep.csv"),
        "summary": os.path.join(path, "summary.csv"),
        "timing": os.path.join(path, "timing.csv"),
    }
    write_csv(
        (
            [r.algo, r.schedule, fmt(r.area_km2), r.n_aps, r.n_users, r.trial, fmt(r.iters_to_tol), int(r.diverged)]
            for r in report.rows
        ),
        SWEEP_HEADER,
        files["sweep"],
    )
    write_csv(summarize(report), SUMMARY_HEADER, files["summary"])
    write_csv(
        ([r.algo, r.schedule, fmt(r.area_km2), r.trial, repr(r.wall_time)] for r in report.rows),
        ["algo", "schedule", "area_km2", "trial", "wall_time"],
        files["timing"],
    )
    return files
