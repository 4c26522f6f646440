"""Command-line front end: gen, solve, verify, oracle, export, score."""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import benchgen, spectral, xbdd
from .model import HsmtError, eval_formula, export_smt2, format_assignment, parse_assignment, \
    parse_instance, serialize_instance
from .optimizer import SolverConfig, Sat, anneal_solve

EXIT_SAT, EXIT_UNKNOWN, EXIT_UNSAT, EXIT_ERROR = 10, 0, 20, 1
EXIT_VIOLATED = 2


@dataclass
class RunRecord:
    instance: str
    solver: str
    result: str  # sat | unknown | timeout
    wall_seconds: float
    seed: int
    config: str


RECORD_FIELDS = [k for k in RunRecord.__dataclass_fields__]


def par2(records, T: float) -> float:
    """Mean runtime with every non-sat or over-limit run charged 2T."""
    if not records:
        raise ValueError("no records to score")
    total = 0.0
    for r in records:
        t = float(r.wall_seconds)
        total += t if (r.result == "sat" and t <= T) else 2.0 * T
    return total / len(records)


def read_records(path) -> list[RunRecord]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for row in rows:
        missing = [k for k in ("instance", "result", "wall_seconds") if k not in row]
        if missing:
            raise ValueError(f"results csv lacks columns {missing}")
        if row["result"] not in ("sat", "unknown", "timeout"):
            raise ValueError(f"bad result {row['result']!r}")
        out.append(RunRecord(row["instance"], row.get("solver") or "fsmt", row["result"],
                             float(row["wall_seconds"]), int(row.get("seed") or 0), row.get("config") or ""))
    return out


def append_record(path, rec: RunRecord):
    fresh = not Path(path).exists() or Path(path).stat().st_size == 0
    with open(path, "a", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=RECORD_FIELDS)
        if fresh:
            w.writeheader()
        w.writerow(asdict(rec))


def parse_schedule(text: str) -> tuple[float, ...]:
    """``a:b:step`` over 1/sigma, both ends included; returns sigma values."""
    try:
        a, b, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b:step, got {text!r}")
    if a <= 0 or b < a or step <= 0:
        raise argparse.ArgumentTypeError("need 0 < a <= b and step > 0")
    n = int(round((b - a) / step)) + 1
    inv = a + step * np.arange(n)
    return tuple(float(1.0 / v) for v in inv)


def _read_formula(path):
    return parse_instance(Path(path).read_text())


def _write(text: str, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# ---------------------------------------------------------------------------
# commands


def cmd_gen(args) -> int:
    fam = args.family
    if fam == "random":
        spec = benchgen.RandomSpec(args.n, args.seed)
        if args.card_k is not None:
            spec = benchgen.RandomSpec(args.n, args.seed, card_k=args.card_k)
        f = benchgen.gen_random(spec)
    elif fam == "small":
        f = benchgen.gen_small_random(args.seed)
    elif fam == "scheduling":
        f = benchgen.gen_scheduling(benchgen.SchedulingSpec(args.n_w, args.r, args.seed))
    else:
        f = benchgen.gen_placement(benchgen.PlacementSpec(args.n_m, args.n_l, args.seed))
    _write(serialize_instance(f), args.out)
    return 0


def _config(args) -> SolverConfig:
    kw = dict(eta_mode=args.eta_mode, eps=args.eps, max_inner_iters=args.max_iters, restarts=args.restarts,
              seed=args.seed, time_limit_s=args.time_limit, threads=args.threads, backend=args.backend)
    if args.eta is not None:
        kw["eta"] = args.eta
    if args.sigma_schedule is not None:
        kw["schedule"] = args.sigma_schedule
    return SolverConfig(**kw)


def cmd_solve(args) -> int:
    f = _read_formula(args.file)
    cfg = _config(args)
    if args.emit_smt2:
        Path(args.emit_smt2).write_text(export_smt2(f))
    if args.dump_bdd:
        out = Path(args.dump_bdd)
        out.mkdir(parents=True, exist_ok=True)
        for i, c in enumerate(f.constraints):
            (out / f"c{i}.dot").write_text(xbdd.to_dot(xbdd.compile(c), name=f"c{i}"))
    records = []
    t0 = time.monotonic()
    res = anneal_solve(f, cfg, log=records.append if args.log else None)
    wall = time.monotonic() - t0
    sat = False
    if isinstance(res, Sat):
        obj, flags = eval_formula(f, res.assignment)
        # never report a model that exact evaluation rejects
        sat = all(flags) and obj == -f.total_weight
    if args.log:
        with open(args.log, "w") as fh:
            for rec in records:
                fh.write(json.dumps(rec, default=float) + "\n")
            fh.write(json.dumps({"result": "sat" if sat else "unknown", "config": cfg.digest(),
                                 "wall_ms": 1e3 * wall}) + "\n")
    if args.record:
        timed_out = not sat and bool(getattr(res, "stats", {}).get("timeout"))
        append_record(args.record, RunRecord(str(args.file), "fsmt", "sat" if sat else
                                             ("timeout" if timed_out else "unknown"), wall, cfg.seed, cfg.digest()))
    if sat:
        print("s SATISFIABLE")
        for line in format_assignment(res.assignment):
            print(line)
        return EXIT_SAT
    print("s UNKNOWN")
    return EXIT_UNKNOWN


def cmd_verify(args) -> int:
    f = _read_formula(args.file)
    asg = parse_assignment(Path(args.assignment).read_text())
    asg.check_dims(f)
    obj, flags = eval_formula(f, asg)
    if all(flags) and obj == -f.total_weight:
        print("c verified")
        return 0
    print(f"c violated constraints: {[i for i, ok in enumerate(flags) if not ok]}")
    return EXIT_VIOLATED


def cmd_oracle(args) -> int:
    f = _read_formula(args.file)
    res = spectral.brute_force_sat(f)
    if isinstance(res, spectral.Sat):
        print("s SATISFIABLE")
        for line in format_assignment(res.assignment):
            print(line)
        return EXIT_SAT
    print("s UNSATISFIABLE")
    return EXIT_UNSAT


def cmd_export(args) -> int:
    f = _read_formula(args.file)
    if args.format == "smt2":
        _write(export_smt2(f), args.out)
    elif args.format == "hsmt":
        _write(serialize_instance(f), args.out)
    else:
        out = Path(args.out or "bdd")
        out.mkdir(parents=True, exist_ok=True)
        for i, c in enumerate(f.constraints):
            (out / f"c{i}.dot").write_text(xbdd.to_dot(xbdd.compile(c), name=f"c{i}"))
    return 0


def cmd_score(args) -> int:
    recs = read_records(args.results)
    by_solver: dict[str, list] = {}
    for r in recs:
        by_solver.setdefault(r.solver, []).append(r)
    for name in sorted(by_solver):
        rs = by_solver[name]
        solved = sum(r.result == "sat" and r.wall_seconds <= args.T for r in rs)
        print(f"{name} par2={par2(rs, args.T):.6g} solved={solved}/{len(rs)}")
    return 0


# ---------------------------------------------------------------------------


def _threads_default() -> int:
    try:
        return max(1, int(os.environ.get("FSMT_THREADS", "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fsmt", description="Continuous local search for SMT(LRA).")
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="generate a benchmark instance")
    g.add_argument("family", choices=["random", "small", "scheduling", "placement"])
    g.add_argument("--n", type=int, default=100)
    g.add_argument("--card-k", type=int, default=None)
    g.add_argument("--n-w", type=int, default=4)
    g.add_argument("--r", type=int, default=2)
    g.add_argument("--n-m", type=int, default=2)
    g.add_argument("--n-l", type=int, default=2)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--out", default=None)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run the annealed local search")
    s.add_argument("file")
    s.add_argument("--eta", type=float, default=None)
    s.add_argument("--eta-mode", choices=["lipschitz", "fixed", "armijo"], default="lipschitz")
    s.add_argument("--eps", type=float, default=1e-2)
    s.add_argument("--sigma-schedule", type=parse_schedule, default=None,
                   help="a:b:step over 1/sigma (default 0.1:2.0:0.1)")
    s.add_argument("--max-iters", type=int, default=1000)
    s.add_argument("--restarts", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--time-limit", type=float, default=None)
    s.add_argument("--threads", type=int, default=_threads_default())
    s.add_argument("--backend", choices=["auto", "xbdd", "symmetric"], default="auto")
    s.add_argument("--log", default=None, help="JSON-lines log of every stage")
    s.add_argument("--record", default=None, help="append a run record to this csv")
    s.add_argument("--dump-bdd", default=None, metavar="DIR")
    s.add_argument("--emit-smt2", default=None, metavar="PATH")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check an assignment exactly")
    v.add_argument("file")
    v.add_argument("assignment")
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", help="complete brute-force decision (small instances)")
    o.add_argument("file")
    o.set_defaults(func=cmd_oracle)

    e = sub.add_parser("export", help="write SMT-LIB2, HSMT or diagram dot files")
    e.add_argument("file")
    e.add_argument("--format", choices=["smt2", "hsmt", "dot"], default="smt2")
    e.add_argument("-o", "--out", default=None)
    e.set_defaults(func=cmd_export)

    sc = sub.add_parser("score", help="PAR-2 per solver from a results csv")
    sc.add_argument("results")
    sc.add_argument("--T", type=float, required=True, help="time limit in seconds")
    sc.set_defaults(func=cmd_score)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, HsmtError, ValueError, spectral.OracleLimitExceeded, xbdd.NodeBudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
