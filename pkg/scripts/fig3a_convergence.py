"""Convergence at 40 APs / 32 users / 10 km^2.

Writes the per-iteration relative-error trajectories of every configured
detector and prints the per-detector median iterations to tolerance.

    python scripts/fig3a_convergence.py --config configs/fig3a.cfg --out results/fig3a
"""

import argparse
import os

import numpy as np

from hudn.harness import load_config, run_scenario, run_trial


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--config", default="configs/fig3a.cfg")
    ap.add_argument("--trials", type=int, default=None)
    ap.add_argument("--out", default="results/fig3a")
    args = ap.parse_args()

    cfg = load_config(args.config)
    if args.trials is not None:
        cfg.trials = args.trials
    os.makedirs(args.out, exist_ok=True)
    run_scenario(cfg, os.path.join(args.out, "trajectories.csv"))

    iters = {p.label: [] for p in cfg.detectors}
    for t in range(cfg.trials):
        for run in run_trial(cfg.scenario, cfg.detectors, cfg.base_seed + t):
            v = run.iters_to_tol
            iters[run.params.label].append(np.inf if v is None else v)
    for label, v in iters.items():
        v = np.array(v, dtype=float)
        print(f"{label:18s} median {np.median(v):8.1f}  reached {np.isfinite(v).mean():.0%}")


if __name__ == "__main__":
    main()
