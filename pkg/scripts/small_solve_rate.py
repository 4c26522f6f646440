"""Solve rate on tiny random instances, checked against the brute-force oracle."""
import argparse
import time

from fsmt.benchgen import gen_small_random
from fsmt.optimizer import Sat, SolverConfig, anneal_solve
from fsmt.spectral import Sat as OracleSat
from fsmt.spectral import brute_force_sat


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--first-seed", type=int, default=1000)
    ap.add_argument("--restarts", type=int, default=1)
    ap.add_argument("--eta-mode", default="lipschitz")
    ap.add_argument("--eta", type=float, default=0.1)
    args = ap.parse_args()

    cfg = SolverConfig(restarts=args.restarts, eta_mode=args.eta_mode, eta=args.eta)
    n_sat = solved = wrong = 0
    t0 = time.perf_counter()
    for s in range(args.first_seed, args.first_seed + args.count):
        f = gen_small_random(s)
        truth = isinstance(brute_force_sat(f), OracleSat)
        got = isinstance(anneal_solve(f, cfg), Sat)
        n_sat += truth
        solved += truth and got
        wrong += got and not truth
    print(f"oracle-sat {n_sat}/{args.count}, solved {solved}/{n_sat} ({solved / max(n_sat, 1):.1%}), "
          f"contradictions {wrong}, {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
