"""Command line entry point: ``hudn {gen,detect,sweep,alloc}``.

Exit codes: 0 success, 2 configuration error, 3 numerical divergence in
single-run mode.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from .. import alloc as alloc_mod
from ..detectors import BreakdownError, DivergenceError, run_detector
from ..geometry import ConflictGraph, DegenerateTopologyError, build_conflict_graph, sample_topology, save_json
from .config import ConfigError, load_config, parse_areas
from .experiment import (
    TRAJECTORY_HEADER,
    emit_reports,
    make_instance,
    schedule_name,
    sweep_network_size,
    write_csv,
)

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED = 0, 2, 3
log = logging.getLogger("hudn")


def _cmd_gen(args) -> int:
    cfg = load_config(args.config)
    topo = sample_topology(cfg.scenario, args.seed)
    save_json(topo.to_json(), args.out)
    if args.graph_out:
        save_json(build_conflict_graph(topo, cfg.scenario).to_json(), args.graph_out)
    log.info("wrote %d APs, %d users to %s", topo.n_aps, topo.n_users, args.out)
    return EXIT_OK


def _cmd_detect(args) -> int:
    cfg = load_config(args.config)
    base = cfg.detectors[0]
    try:
        params = dataclasses.replace(
            base,
            algo=args.algo or base.algo,
            schedule=args.schedule or base.schedule,
            seed=args.seed,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    inst = make_instance(cfg.scenario, args.seed)
    try:
        res = run_detector(inst.H, inst.y, params, inst.x_ref)
        traj, code = res.trajectory, EXIT_OK
    except (DivergenceError, BreakdownError) as exc:
        log.error("detector diverged: %s", exc)
        traj, code = getattr(exc, "trajectory", []), EXIT_DIVERGED
    rows = ([params.algo, schedule_name(params), args.seed, t, repr(float(e))] for t, e in enumerate(traj))
    write_csv(rows, TRAJECTORY_HEADER, args.out)
    return code


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    overrides = {}
    if args.areas:
        overrides["areas"] = parse_areas(args.areas)
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.workers is not None:
        overrides["workers"] = args.workers
    cfg = dataclasses.replace(cfg, **overrides)
    if not cfg.areas:
        raise ConfigError("sweep needs areas (config key or --areas)")
    files = emit_reports(sweep_network_size(cfg), args.out)
    log.info("wrote %s", ", ".join(files.values()))
    return EXIT_OK


def _cmd_alloc(args) -> int:
    try:
        graph = ConflictGraph.from_json(alloc_mod.load_json(args.graph))
        seeds = alloc_mod.SeedLabels.from_json(alloc_mod.load_json(args.seeds))
        # unreachable vertices and bad seeds are input errors
        result = alloc_mod.propagate_labels(graph, seeds, tol=args.tol, max_iter=args.max_iter)
    except (OSError, KeyError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    alloc_mod.write_assignment_csv(result, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hudn", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="sample a topology and write it as JSON")
    g.add_argument("--config", required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--graph-out", help="also write the user conflict graph here")
    g.set_defaults(func=_cmd_gen)

    d = sub.add_parser("detect", help="run one detector on one seeded instance")
    d.add_argument("--config", required=True)
    d.add_argument("--algo")
    d.add_argument("--schedule")
    d.add_argument("--seed", type=int, required=True)
    d.add_argument("--out", required=True)
    d.set_defaults(func=_cmd_detect)

    s = sub.add_parser("sweep", help="iterations-to-tolerance against network area")
    s.add_argument("--config", required=True)
    s.add_argument("--areas", help="comma-separated areas in km^2")
    s.add_argument("--trials", type=int)
    s.add_argument("--workers", type=int)
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=_cmd_sweep)

    a = sub.add_parser("alloc", help="label propagation channel assignment")
    a.add_argument("--graph", required=True)
    a.add_argument("--seeds", required=True)
    a.add_argument("--out", required=True)
    a.add_argument("--tol", type=float, default=1e-6)
    a.add_argument("--max-iter", type=int, default=10_000)
    a.set_defaults(func=_cmd_alloc)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (ConfigError, DegenerateTopologyError) as exc:
        print(f"hudn: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
