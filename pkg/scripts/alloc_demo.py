"""Channel allocation on a user conflict graph by harmonic label propagation.

Samples a topology, links users closer than the conflict radius and spreads
a few seeded channel labels over the graph.

    python scripts/alloc_demo.py --radius 1500 --labels 3 --seed 0
"""

import argparse
import dataclasses

import numpy as np

from hudn.alloc import SeedLabels, harmonic_oracle, propagate_labels
from hudn.geometry import ScenarioConfig, build_conflict_graph, sample_topology


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--radius", type=float, default=1500.0, help="conflict radius in metres")
    ap.add_argument("--labels", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    scenario = dataclasses.replace(ScenarioConfig(), conflict_radius=args.radius)
    topo = sample_topology(scenario, args.seed)
    g = build_conflict_graph(topo, scenario)
    rng = np.random.default_rng(args.seed)
    verts = rng.choice(g.n_vertices, args.labels, replace=False)
    seeds = SeedLabels(args.labels, {int(v): l for l, v in enumerate(verts)})

    res = propagate_labels(g, seeds, tol=1e-12)
    gap = np.max(np.abs(res.scores - harmonic_oracle(g, seeds)))
    print(f"{g.n_vertices} users, {len(g.edges)} conflict edges, {res.iterations} sweeps")
    print(f"max deviation from closed form: {gap:.2e}")
    print("label counts:", np.bincount(res.labels, minlength=args.labels).tolist())


if __name__ == "__main__":
    main()
