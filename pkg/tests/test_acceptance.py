"""Acceptance criteria, each at its stated tolerance and runtime budget.

A per-criterion PASS/FAIL line is printed in the terminal summary.
"""

import time
from pathlib import Path

import numpy as np
import pytest

from conftest import cn
from hudn.alloc import SeedLabels, harmonic_oracle, propagate_labels
from hudn.detectors import (
    DetectorParams,
    build_factor_graph,
    lmmse_direct,
    posterior_covariance,
    relative_error,
    run_cg,
    run_detector,
    run_gaussian_bp,
)
from hudn.geometry import ChannelMatrix, ConflictGraph
from hudn.harness import emit_reports, load_config, run_scenario, run_trial, sweep_network_size
from oracles import bipartite_diameter, random_tree_channel

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def inf_if_none(v):
    return float("inf") if v is None else float(v)


def dense_instance(seed, n=8, k=8):
    rng = np.random.default_rng(seed)
    Hd = cn(rng, (n, k))
    y = Hd @ cn(rng, k) + cn(rng, n)
    H = ChannelMatrix.from_dense(Hd)
    return H, y, lmmse_direct(H, y)


@pytest.mark.criterion(1, "oracle equivalence on 20 dense 8x8 instances, all detectors to 1e-6")
def test_oracle_equivalence():
    start = time.perf_counter()
    detectors = [
        DetectorParams(algo="mp", schedule="sync", tol=1e-6, max_iter=500),
        DetectorParams(algo="mp", schedule="damped", tol=1e-6, max_iter=500),
        DetectorParams(algo="mp", schedule="random_async", tol=1e-6, max_iter=500),
        DetectorParams(algo="cg", tol=1e-6, max_iter=500),
        DetectorParams(algo="gamp", tol=1e-6, max_iter=500),
        DetectorParams(algo="admm", tol=1e-6, max_iter=500),
    ]
    failures = []
    for seed in range(20):
        H, y, x_ref = dense_instance(1000 + seed)
        for p in detectors:
            res = run_detector(H, y, p, x_ref)
            err = relative_error(res.estimate, x_ref)
            if not (res.converged and err <= 1e-6):
                failures.append((seed, p.label, err, res.iterations))
    elapsed = time.perf_counter() - start
    assert not failures, failures
    assert elapsed < 10.0


@pytest.mark.criterion(2, "40 APs / 32 users / 10 km^2: MP beats CG on >= 80% of 50 trials, median below GAMP and ADMM")
def test_fig3a_ordering():
    start = time.perf_counter()
    cfg = load_config(CONFIGS / "fig3a.cfg")
    assert (cfg.scenario.n_aps, cfg.scenario.n_users, cfg.scenario.area) == (40, 32, 10.0)
    assert cfg.scenario.tx_snr_db == 95.0 and cfg.trials == 50
    iters = {p.algo: [] for p in cfg.detectors}
    for t in range(cfg.trials):
        for run in run_trial(cfg.scenario, cfg.detectors, cfg.base_seed + t):
            iters[run.params.algo].append(inf_if_none(run.iters_to_tol))
    mp, cg = np.array(iters["mp"]), np.array(iters["cg"])
    wins = np.mean(mp < cg)
    med = {k: float(np.median(v)) for k, v in iters.items()}
    print(f"MP<CG fraction {wins:.2f}; medians {med}")
    elapsed = time.perf_counter() - start
    assert wins >= 0.8
    assert med["mp"] < med["gamp"] and med["mp"] < med["admm"]
    assert elapsed < 60.0


@pytest.mark.criterion(3, "areas 1,2,4,8 x 30 trials: MP median within 2x, CG median strictly increasing")
def test_fig3b_scaling():
    start = time.perf_counter()
    cfg = load_config(CONFIGS / "fig3b.cfg")
    assert cfg.areas == [1.0, 2.0, 4.0, 8.0] and cfg.trials == 30
    report = sweep_network_size(cfg)
    med = {}
    for algo in ("mp", "cg"):
        med[algo] = [
            float(np.median([inf_if_none(r.iters_to_tol) for r in report.rows if r.algo == algo and r.area_km2 == a]))
            for a in cfg.areas
        ]
    print(f"medians by area {med}")
    elapsed = time.perf_counter() - start
    assert np.all(np.isfinite(med["mp"]))
    assert max(med["mp"]) <= 2 * min(med["mp"])
    assert all(b > a for a, b in zip(med["cg"], med["cg"][1:]))
    assert elapsed < 300.0


@pytest.mark.criterion(4, "tree exactness of BP means and variances to 1e-10 on 50 random trees")
def test_tree_exactness():
    start = time.perf_counter()
    worst_mean = worst_var = 0.0
    for seed in range(50):
        rng = np.random.default_rng(5000 + seed)
        Hd = random_tree_channel(rng, max_nodes=20)
        y = cn(rng, Hd.shape[0])
        H = ChannelMatrix.from_dense(Hd)
        x_ref = lmmse_direct(H, y)
        sweeps = max(bipartite_diameter(Hd), 1)
        p = DetectorParams(algo="mp", schedule="sync", max_iter=sweeps, tol=1e-300)
        res = run_gaussian_bp(build_factor_graph(H), y, H.noise_var, H.prior_var, p, x_ref)
        var = np.diag(posterior_covariance(H)).real
        worst_mean = max(worst_mean, relative_error(res.estimate, x_ref))
        worst_var = max(worst_var, float(np.max(np.abs(res.variances - var) / var)))
    elapsed = time.perf_counter() - start
    assert worst_mean <= 1e-10 and worst_var <= 1e-10, (worst_mean, worst_var)
    assert elapsed < 10.0


@pytest.mark.criterion(5, "CG error norm is non-increasing within 1e-12 on 20 instances")
def test_cg_monotone():
    for seed in range(20):
        rng = np.random.default_rng(7000 + seed)
        n = int(rng.integers(4, 16))
        H, y, x_ref = dense_instance(7000 + seed, n + int(rng.integers(0, 6)), n)
        res = run_cg(H, y, DetectorParams(algo="cg", tol=1e-14, max_iter=500), x_ref)
        err = np.array(res.trajectory) * np.linalg.norm(x_ref)
        assert np.all(np.diff(err) <= 1e-12), seed


def _connected_graph(rng, n):
    edges = {}
    for v in range(1, n):
        edges[(int(rng.integers(0, v)), v)] = float(rng.uniform(0.01, 1.0))
    for _ in range(int(rng.integers(0, 2 * n))):
        i, j = sorted(rng.choice(n, 2, replace=False).tolist())
        edges.setdefault((i, j), float(rng.uniform(0.01, 1.0)))
    return ConflictGraph(n, [(i, j, w) for (i, j), w in sorted(edges.items())])


@pytest.mark.criterion(6, "label propagation matches the harmonic closed form to 1e-8; path tie is (0.5, 0.5)")
def test_label_propagation_oracle():
    for seed in range(50):
        rng = np.random.default_rng(9000 + seed)
        n = int(rng.integers(2, 51))
        n_labels = int(rng.integers(1, 5))
        g = _connected_graph(rng, n)
        verts = rng.choice(n, int(rng.integers(1, max(2, n // 4) + 1)), replace=False)
        seeds = SeedLabels(n_labels, {int(v): int(rng.integers(0, n_labels)) for v in verts})
        res = propagate_labels(g, seeds, tol=1e-12, max_iter=200_000)
        assert np.max(np.abs(res.scores - harmonic_oracle(g, seeds))) <= 1e-8, seed
    path = ConflictGraph(3, [(0, 1, 1.0), (1, 2, 1.0)])
    res = propagate_labels(path, SeedLabels(2, {0: 0, 2: 1}))
    assert np.max(np.abs(res.scores[1] - [0.5, 0.5])) <= 1e-9


@pytest.mark.criterion(7, "repeated sweeps with identical config and seed give byte-identical CSVs")
def test_determinism(tmp_path):
    cfg = load_config(CONFIGS / "fig3b.cfg")
    cfg.trials = 5
    a = emit_reports(sweep_network_size(cfg), tmp_path / "a")
    b = emit_reports(sweep_network_size(cfg), tmp_path / "b")
    for key in ("sweep", "summary"):
        assert Path(a[key]).read_bytes() == Path(b[key]).read_bytes()
    one = load_config(CONFIGS / "fig3a.cfg")
    one.trials = 3
    assert run_scenario(one, tmp_path / "t1.csv") == run_scenario(one, tmp_path / "t2.csv")
    assert (tmp_path / "t1.csv").read_bytes() == (tmp_path / "t2.csv").read_bytes()


@pytest.mark.criterion(8, "damped schedule with beta = 1 is bit-identical to sync on 10 instances")
def test_damping_neutrality():
    for seed in range(10):
        rng = np.random.default_rng(11000 + seed)
        Hd = cn(rng, (10, 8)) * (rng.random((10, 8)) < 0.5)
        Hd[np.arange(8), np.arange(8)] += 1.0
        H = ChannelMatrix.from_dense(Hd)
        y = Hd @ cn(rng, 8) + cn(rng, 10)
        x_ref = lmmse_direct(H, y)
        g = build_factor_graph(H)
        runs = [
            run_gaussian_bp(g, y, 1.0, 1.0, DetectorParams(algo="mp", schedule=s, damping_beta=1.0, max_iter=60, tol=1e-300), x_ref)
            for s in ("sync", "damped")
        ]
        a, b = runs
        assert np.array(a.trajectory).tobytes() == np.array(b.trajectory).tobytes()
        assert a.estimate.tobytes() == b.estimate.tobytes()
