"""Seeded instance generators (random hybrid, scheduling, 3D placement) and domain verifiers."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .model import (FALSE, TRUE, Assignment, Atom, Constraint, Formula, Literal, Op, Symmetric, a, b,
                    eval_formula)

GRID = 2.0**-20  # dyadic grid for generated reals, keeps sums exact in float


def _is_pow2(v: int) -> bool:
    return v >= 1 and v & (v - 1) == 0


class _Builder:
    """Accumulates atoms (deduplicated) and constraints."""

    def __init__(self, n_bool: int, n_real: int):
        self.n_bool, self.n_real = n_bool, n_real
        self.atoms: list[Atom] = []
        self.index: dict[tuple, int] = {}
        self.constraints: list[Constraint] = []

    def atom(self, coeffs: dict, rel: str, rhs: float) -> Literal:
        at = Atom.make(len(self.atoms), coeffs, rel, rhs)
        key = (at.coeffs, at.rhs, at.strict)
        if key not in self.index:
            self.index[key] = at.id
            self.atoms.append(at)
        return a(self.index[key])

    def add(self, body, weight: float = 1.0):
        self.constraints.append(Constraint(body, weight))

    def unit(self, coeffs: dict, rel: str, rhs: float):
        self.add(Symmetric("or", (self.atom(coeffs, rel, rhs),)))

    def formula(self, meta: dict, names=()) -> Formula:
        return Formula(self.n_bool, self.n_real, tuple(self.atoms), tuple(self.constraints), tuple(names),
                       json.dumps(meta, sort_keys=True))


# ---------------------------------------------------------------------------
# random hybrid instances


@dataclass
class RandomSpec:
    n: int
    seed: int = 0
    atom_vars: int = 3
    coeff_choices: tuple = (1, 2, 3)
    card_k: int | None = None  # default floor(l / 2)
    neg_prob: float = 0.5

    @property
    def m_card(self) -> int:
        return self.n // 5

    @property
    def m_nae(self) -> int:
        return self.n // 5

    @property
    def m_xor(self) -> int:
        return self.n // 50

    @property
    def l_card(self) -> int:
        return min(50, self.n // 5)

    @property
    def l_nae(self) -> int:
        return min(50, self.n // 5)

    @property
    def l_xor(self) -> int:
        return 50


def gen_random(spec: RandomSpec) -> Formula:
    n = spec.n
    if n < 50:
        raise ValueError("random family needs n >= 50")
    if spec.atom_vars > n:
        raise ValueError("atom_vars exceeds n")
    rng = np.random.default_rng(spec.seed)
    bld = _Builder(n, n)
    coeffs = np.array(spec.coeff_choices, dtype=float)
    for i in range(n):
        js = rng.choice(n, spec.atom_vars, replace=False)
        qs = rng.choice(coeffs, spec.atom_vars) * rng.choice([-1.0, 1.0], spec.atom_vars)
        at = Atom.make(i, dict(zip(js.tolist(), qs.tolist())), "<=", float(rng.uniform(-1, 1)))
        bld.atoms.append(at)

    def draw(length):
        picks = rng.choice(2 * n, length, replace=False)
        neg = rng.random(length) < spec.neg_prob
        return tuple(Literal("b" if p < n else "a", int(p % n), bool(s)) for p, s in zip(picks, neg))

    for _ in range(spec.m_card):
        k = spec.l_card // 2 if spec.card_k is None else spec.card_k
        bld.add(Symmetric("card", draw(spec.l_card), k))
    for _ in range(spec.m_nae):
        bld.add(Symmetric("nae", draw(spec.l_nae)))
    for _ in range(spec.m_xor):
        bld.add(Symmetric("xor", draw(spec.l_xor)))
    return bld.formula({"family": "random", "n": n, "seed": spec.seed})


def gen_small_random(seed: int, max_bool: int = 10, max_real: int = 3, max_constraints: int = 8,
                     max_atoms: int = 6) -> Formula:
    """Tiny mixed instance within brute-force reach."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, max_bool + 1))
    m = int(rng.integers(1, max_real + 1))
    k = int(rng.integers(1, max_atoms + 1))
    bld = _Builder(n, m)
    for i in range(k):
        width = int(rng.integers(1, min(m, 2) + 1))
        js = rng.choice(m, width, replace=False)
        qs = rng.choice([-2.0, -1.0, 1.0, 2.0], width)
        rel = str(rng.choice(["<=", "<", ">=", ">"]))
        rhs = float(rng.integers(-4, 5)) / 2
        bld.atoms.append(Atom.make(i, dict(zip(js.tolist(), qs.tolist())), rel, rhs))
    pool = [("b", i) for i in range(n)] + [("a", i) for i in range(k)]
    for _ in range(int(rng.integers(1, max_constraints + 1))):
        kind = str(rng.choice(["or", "or", "card", "nae", "xor", "expr"]))
        length = int(rng.integers(1, min(4, len(pool)) + 1))
        picks = rng.choice(len(pool), length, replace=False)
        lits = tuple(Literal(pool[p][0], pool[p][1], bool(rng.random() < 0.5)) for p in picks)
        if kind == "expr":
            # expression leaves are positive; polarity goes through (not ...)
            lits = tuple(Op("not", (Literal(l.kind, l.index),)) if l.negated else l for l in lits)
            if length == 1:
                bld.add(Op("not", lits))
            else:
                op = str(rng.choice(["and", "or", "xor"]))
                inner = Op(str(rng.choice(["and", "or", "xor"])), lits[:2])
                bld.add(Op(op, (inner,) + lits[2:]) if length > 2 else inner)
        elif kind == "card":
            bld.add(Symmetric("card", lits, int(rng.integers(0, length + 1))))
        else:
            bld.add(Symmetric(kind, lits))
    return bld.formula({"family": "small", "seed": seed})


# ---------------------------------------------------------------------------
# scheduling


@dataclass
class SchedulingSpec:
    n_w: int
    r: int
    seed: int = 0
    dep_prob: float = 0.5
    time_window: bool = True  # redundant unit bounds implied by the feasibility clauses

    @property
    def n_j(self) -> int:
        return self.r * self.n_w

    @property
    def bits(self) -> int:
        return int(math.log2(self.n_w))


def _dyadic_uniform(rng, size, low_open: bool = False):
    ticks = rng.integers(1 if low_open else 0, 2**20, size)
    return ticks * GRID


def greedy_schedule(d, t, deps):
    """List scheduler in job order; earliest feasible start, ties to the lowest worker.

    Returns (worker per job, start times, cutoff T = max finish - d[worker]).
    """
    n_w, n_j = len(d), len(t)
    free = np.array(d, dtype=float)
    worker = np.zeros(n_j, dtype=np.int64)
    start = np.zeros(n_j)
    for j in range(n_j):
        ready = start[deps[j]] + t[deps[j]] if deps[j] >= 0 else 0.0
        cand = np.maximum(free, ready)
        w = int(np.argmin(cand))
        worker[j], start[j] = w, cand[w]
        free[w] = cand[w] + t[j]
    T = float(np.max(start + t - np.asarray(d)[worker])) if n_j else 0.0
    return worker, start, T


def gen_scheduling(spec: SchedulingSpec) -> Formula:
    if not _is_pow2(spec.n_w) or spec.n_w < 2:
        raise ValueError("n_w must be a power of two >= 2")
    if spec.r < 1:
        raise ValueError("r must be >= 1")
    rng = np.random.default_rng(spec.seed)
    n_w, n_j, B = spec.n_w, spec.n_j, spec.bits
    d = _dyadic_uniform(rng, n_w)
    t = _dyadic_uniform(rng, n_j, low_open=True)
    deps = np.full(n_j, -1, dtype=np.int64)
    for j in range(1, n_j):
        if rng.random() < spec.dep_prob:
            deps[j] = int(rng.integers(0, j))
    worker, start, T = greedy_schedule(d, t, deps)

    bld = _Builder(n_j * B, n_j)
    x = lambda i, j: j * B + i
    for j in range(n_j):
        p = deps[j]
        if p >= 0:
            # y_j >= y_p + t_p
            bld.unit({p: 1.0, j: -1.0}, "<=", -float(t[p]))
    if spec.time_window:
        # every job runs on some worker, so it starts inside the union of the windows
        for j in range(n_j):
            bld.unit({j: 1.0}, ">=", float(d.min()))
            bld.unit({j: 1.0}, "<=", float(d.max() + T - t[j]))
    for j in range(n_j):
        for jp in range(j + 1, n_j):
            differ = tuple(Op("xor", (b(x(i, j)), b(x(i, jp)))) for i in range(B))
            after = bld.atom({j: 1.0, jp: -1.0}, ">=", float(t[jp]))   # y_j - y_j' >= t_j'
            before = bld.atom({jp: 1.0, j: -1.0}, ">=", float(t[j]))   # y_j' - y_j >= t_j
            bld.add(Op("or", differ + (after, before)))
    for j in range(n_j):
        for w in range(n_w):
            # literal "bit i of X_j differs from bit i of w"
            not_w = tuple(Literal("b", x(i, j), bool((w >> i) & 1)) for i in range(B))
            bld.add(Symmetric("or", not_w + (bld.atom({j: 1.0}, ">=", float(d[w])),)))
            bld.add(Symmetric("or", not_w + (bld.atom({j: 1.0}, "<=", float(d[w] + T - t[j])),)))
    meta = {"family": "scheduling", "n_w": n_w, "r": spec.r, "seed": spec.seed, "bits": B,
            "d": d.tolist(), "t": t.tolist(), "deps": deps.tolist(), "T": T,
            "greedy_worker": worker.tolist(), "greedy_start": start.tolist()}
    names = [(f"y{j}", f"start_{j}") for j in range(n_j)]
    return bld.formula(meta, names)


def scheduling_assignment(f: Formula, worker, start) -> Assignment:
    meta = f.meta_dict()
    B = meta["bits"]
    x = np.full(f.n_bool, FALSE, dtype=np.int64)
    for j, w in enumerate(worker):
        for i in range(B):
            if (int(w) >> i) & 1:
                x[j * B + i] = TRUE
    return Assignment(x, np.asarray(start, dtype=float).copy())


def greedy_witness(f: Formula) -> Assignment:
    meta = f.meta_dict()
    return scheduling_assignment(f, meta["greedy_worker"], meta["greedy_start"])


# ---------------------------------------------------------------------------
# placement


@dataclass
class PlacementSpec:
    n_m: int
    n_l: int
    seed: int = 0
    modules: list = field(default_factory=list)  # filled by gen_placement


def _bits_of(v: int, nbits: int):
    return [(v >> i) & 1 for i in range(nbits)]


def placement_layout(n_m: int, n_l: int, rng) -> dict:
    """Module sizes and pairing groups."""
    n_spe, n_smem = n_m * n_l, n_m * n_l // 2
    kinds = ["large_pe"] * n_m + ["small_pe"] * n_spe + ["large_mem"] * n_m + ["small_mem"] * n_smem
    sizes = [(0.4, 0.4)] * n_m + [(0.2, 0.2)] * n_spe + [(0.1, 0.1)] * n_m
    flip = int(rng.integers(0, 2))
    for i in range(n_smem):
        sizes.append((0.1, 0.05) if (i + flip) % 2 == 0 else (0.05, 0.1))
    o_spe, o_lmem = n_m, n_m + n_spe
    o_smem = o_lmem + n_m
    mem_perm = rng.permutation(n_m)
    spe_perm = rng.permutation(n_spe)
    smem_perm = rng.permutation(n_smem)
    groups, pairs = [], set()
    half = n_l // 2
    for g in range(n_m):
        spes = [o_spe + int(i) for i in spe_perm[g * n_l:(g + 1) * n_l]]
        smems = [o_smem + int(i) for i in smem_perm[g * half:(g + 1) * half]]
        lmem = o_lmem + int(mem_perm[g])
        groups.append({"large_pe": g, "large_mem": lmem, "small_pe": spes, "small_mem": smems})
        pairs.add((g, lmem))
        for li, pe in enumerate(spes):
            for mi in {li // 2, (li // 2 + 1) % half}:
                pairs.add((pe, smems[mi]))
    return {"kinds": kinds, "sizes": sizes, "groups": groups, "pairs": sorted(pairs)}


def gen_placement(spec: PlacementSpec) -> Formula:
    n_m, n_l = spec.n_m, spec.n_l
    if not (_is_pow2(n_m) and _is_pow2(n_l)) or n_l < 2:
        raise ValueError("n_m must be a power of two and n_l a power of two >= 2")
    rng = np.random.default_rng(spec.seed)
    lay = placement_layout(n_m, n_l, rng)
    spec.modules = list(zip(lay["kinds"], lay["sizes"]))
    n_mod = len(lay["kinds"])
    Bm, Bl = int(math.log2(n_m)), int(math.log2(n_l))
    per = Bm + Bl
    mbit = lambda j, i: j * per + i
    lbit = lambda j, i: j * per + Bm + i
    X = lambda j: 2 * j
    Y = lambda j: 2 * j + 1
    W = [s[0] for s in lay["sizes"]]
    H = [s[1] for s in lay["sizes"]]
    bld = _Builder(n_mod * per, 2 * n_mod)
    # routing-aware adjacency
    for j, jp in lay["pairs"]:
        for i in range(Bm):
            bld.add(Op("not", (Op("xor", (b(mbit(j, i)), b(mbit(jp, i)))),)))
        bld.unit({X(j): 1.0, X(jp): -1.0}, "<=", W[jp])
        bld.unit({X(jp): 1.0, X(j): -1.0}, "<=", W[j])
        bld.unit({Y(j): 1.0, Y(jp): -1.0}, "<=", H[jp])
        bld.unit({Y(jp): 1.0, Y(j): -1.0}, "<=", H[j])
    # non-overlap inside a shared macro and layer
    for j in range(n_mod):
        for jp in range(j + 1, n_mod):
            differ = tuple(Op("xor", (b(mbit(j, i)), b(mbit(jp, i)))) for i in range(Bm))
            differ += tuple(Op("xor", (b(lbit(j, i)), b(lbit(jp, i)))) for i in range(Bl))
            sep = (bld.atom({X(j): 1.0, X(jp): -1.0}, ">=", W[jp]),
                   bld.atom({X(jp): 1.0, X(j): -1.0}, ">=", W[j]),
                   bld.atom({Y(j): 1.0, Y(jp): -1.0}, ">=", H[jp]),
                   bld.atom({Y(jp): 1.0, Y(j): -1.0}, ">=", H[j]))
            bld.add(Op("or", differ + sep))
    # feasibility
    for j in range(n_mod):
        bld.unit({X(j): 1.0}, ">=", 0.0)
        bld.unit({X(j): 1.0}, "<=", 1.0 - W[j])
        bld.unit({Y(j): 1.0}, ">=", 0.0)
        bld.unit({Y(j): 1.0}, "<=", 1.0 - H[j])
    meta = {"family": "placement", "n_m": n_m, "n_l": n_l, "seed": spec.seed, "macro_bits": Bm,
            "layer_bits": Bl, "kinds": lay["kinds"], "sizes": lay["sizes"], "groups": lay["groups"],
            "pairs": lay["pairs"]}
    return bld.formula(meta)


def placement_assignment(f: Formula, macro, layer, xy) -> Assignment:
    meta = f.meta_dict()
    Bm, Bl = meta["macro_bits"], meta["layer_bits"]
    per = Bm + Bl
    x = np.full(f.n_bool, FALSE, dtype=np.int64)
    for j in range(len(macro)):
        for i, bit in enumerate(_bits_of(int(macro[j]), Bm) + _bits_of(int(layer[j]), Bl)):
            if bit:
                x[j * per + i] = TRUE
    return Assignment(x, np.asarray(xy, dtype=float).reshape(-1).copy())


def placement_witness(f: Formula) -> Assignment:
    """Constructive solution: one macro per pairing group, stacked on distinct layers."""
    meta = f.meta_dict()
    n_mod = len(meta["kinds"])
    macro = np.zeros(n_mod, dtype=np.int64)
    layer = np.zeros(n_mod, dtype=np.int64)
    xy = np.zeros((n_mod, 2))
    for g, grp in enumerate(meta["groups"]):
        macro[grp["large_pe"]] = macro[grp["large_mem"]] = g
        xy[grp["large_mem"]] = (0.4, 0.0)
        for li, j in enumerate(grp["small_pe"]):
            macro[j], layer[j], xy[j] = g, li, (0.0, 0.5)
        for li, j in enumerate(grp["small_mem"]):
            macro[j], layer[j], xy[j] = g, li, (0.2, 0.5)
    return placement_assignment(f, macro, layer, xy)


# ---------------------------------------------------------------------------
# domain verification


@dataclass
class DomainReport:
    family: str
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _decode(x, offset: int, nbits: int) -> int:
    return sum(1 << i for i in range(nbits) if x[offset + i] == TRUE)


def verify_domain(f: Formula, asg: Assignment, family: str | None = None) -> DomainReport:
    """Check an assignment against the scheduling / placement rules directly."""
    meta = f.meta_dict()
    family = family or meta.get("family")
    if family not in ("scheduling", "placement"):
        raise ValueError(f"unsupported family {family!r}")
    if meta.get("family") != family:
        raise ValueError("formula metadata does not describe this family")
    asg.check_dims(f)
    rep = DomainReport(family)
    x, y = asg.x, asg.y
    if family == "scheduling":
        B, d, t, deps, T = meta["bits"], meta["d"], meta["t"], meta["deps"], meta["T"]
        n_j = len(t)
        wk = [_decode(x, j * B, B) for j in range(n_j)]
        for j in range(n_j):
            if not y[j] >= d[wk[j]]:
                rep.violations.append(("start_before_worker", j))
            if not y[j] <= d[wk[j]] + T - t[j]:
                rep.violations.append(("past_cutoff", j))
            if deps[j] >= 0 and not y[j] - y[deps[j]] >= t[deps[j]]:
                rep.violations.append(("dependency", j, deps[j]))
        for j in range(n_j):
            for jp in range(j + 1, n_j):
                if wk[j] == wk[jp] and not (y[j] - y[jp] >= t[jp] or y[jp] - y[j] >= t[j]):
                    rep.violations.append(("overlap", j, jp))
        return rep

    Bm, Bl = meta["macro_bits"], meta["layer_bits"]
    per = Bm + Bl
    sizes = meta["sizes"]
    n_mod = len(sizes)
    mac = [_decode(x, j * per, Bm) for j in range(n_mod)]
    lay = [_decode(x, j * per + Bm, Bl) for j in range(n_mod)]
    px, py = y[0::2], y[1::2]
    for j, (w, h) in enumerate(sizes):
        if not (px[j] >= 0 and px[j] <= 1 - w and py[j] >= 0 and py[j] <= 1 - h):
            rep.violations.append(("outside_macro", j))
    for j, jp in meta["pairs"]:
        if mac[j] != mac[jp]:
            rep.violations.append(("pair_split", j, jp))
        (w, h), (wp, hp) = sizes[j], sizes[jp]
        if not (px[j] - px[jp] <= wp and px[jp] - px[j] <= w and py[j] - py[jp] <= hp and py[jp] - py[j] <= h):
            rep.violations.append(("pair_not_adjacent", j, jp))
    for j in range(n_mod):
        for jp in range(j + 1, n_mod):
            if mac[j] != mac[jp] or lay[j] != lay[jp]:
                continue
            (w, h), (wp, hp) = sizes[j], sizes[jp]
            if not (px[j] - px[jp] >= wp or px[jp] - px[j] >= w or py[j] - py[jp] >= hp or py[jp] - py[j] >= h):
                rep.violations.append(("overlap", j, jp))
    return rep


def agrees_with_formula(f: Formula, asg: Assignment) -> bool:
    """True when the domain verdict matches full satisfaction of the formula."""
    _, flags = eval_formula(f, asg)
    return verify_domain(f, asg).ok == all(flags)
