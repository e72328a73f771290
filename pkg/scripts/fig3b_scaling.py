"""Iterations to tolerance versus network area at fixed AP and user density.

    python scripts/fig3b_scaling.py --config configs/fig3b.cfg --out results/fig3b
"""

import argparse
import csv

from hudn.harness import emit_reports, load_config, sweep_network_size


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--config", default="configs/fig3b.cfg")
    ap.add_argument("--trials", type=int, default=None)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results/fig3b")
    args = ap.parse_args()

    cfg = load_config(args.config)
    if args.trials is not None:
        cfg.trials = args.trials
    cfg.workers = args.workers
    files = emit_reports(sweep_network_size(cfg), args.out)
    with open(files["summary"]) as f:
        for row in csv.DictReader(f):
            print(f"{row['algo']:5s} {row['schedule']:13s} area {row['area_km2']:>5s}  median {row['median_iters']:>12s}")
    print(f"wrote {', '.join(files.values())}")


if __name__ == "__main__":
    main()
