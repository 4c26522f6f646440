"""Run the solver over generated instances and append run records for PAR-2 scoring.

    python scripts/random_benchmark.py --family random --n 100 200 --seeds 3 --T 60 --out runs.csv
    fsmt score runs.csv --T 60
"""
import argparse
import time

import numpy as np

from fsmt.benchgen import (PlacementSpec, RandomSpec, SchedulingSpec, gen_placement, gen_random, gen_scheduling,
                           verify_domain)
from fsmt.cli import RunRecord, append_record, par2
from fsmt.model import is_model
from fsmt.optimizer import Sat, SolverConfig, anneal_solve


def instances(args):
    for seed in range(args.seeds):
        if args.family == "random":
            for n in args.n:
                yield f"random-n{n}-s{seed}", gen_random(RandomSpec(n, seed))
        elif args.family == "scheduling":
            yield f"sched-w{args.n_w}-r{args.r}-s{seed}", gen_scheduling(SchedulingSpec(args.n_w, args.r, seed))
        else:
            yield f"place-m{args.n_m}-l{args.n_l}-s{seed}", gen_placement(PlacementSpec(args.n_m, args.n_l, seed))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--family", choices=["random", "scheduling", "placement"], default="random")
    ap.add_argument("--n", type=int, nargs="+", default=[100])
    ap.add_argument("--n-w", type=int, default=4)
    ap.add_argument("--r", type=int, default=2)
    ap.add_argument("--n-m", type=int, default=2)
    ap.add_argument("--n-l", type=int, default=2)
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--T", type=float, default=120.0)
    ap.add_argument("--restarts", type=int, default=8)
    ap.add_argument("--eta-mode", default="armijo")
    ap.add_argument("--eta", type=float, default=1.0)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    cfg = SolverConfig(eta_mode=args.eta_mode, eta=args.eta, schedule=tuple(np.geomspace(1.0, 0.01, 20)),
                       restarts=args.restarts, time_limit_s=args.T)
    recs = []
    for name, f in instances(args):
        t0 = time.perf_counter()
        res = anneal_solve(f, cfg)
        wall = time.perf_counter() - t0
        ok = isinstance(res, Sat) and is_model(f, res.assignment)
        if ok and args.family != "random":
            ok = verify_domain(f, res.assignment).ok
        status = "sat" if ok else ("timeout" if res.stats.get("timeout") else "unknown")
        rec = RunRecord(name, "fsmt", status, wall, cfg.seed, cfg.digest())
        recs.append(rec)
        if args.out:
            append_record(args.out, rec)
        print(f"{name:28s} {status:8s} {wall:8.2f}s")
    print(f"PAR-2 at T={args.T:g}: {par2(recs, args.T):.3f}")


if __name__ == "__main__":
    main()
