"""Smoothed objective, projection, projected gradient descent and the annealing loop."""
from __future__ import annotations

import hashlib
import json
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import linprog

from . import xbdd
from .model import TRUE, Assignment, Formula, Symmetric, constraint_slots, eval_formula
from .smoothing import SQRT2, SQRT_PI, AtomMatrix

WEIGHT_CAP = 1e12


class DykstraNonConvergence(RuntimeWarning):
    pass


def default_schedule() -> tuple[float, ...]:
    """sigma values for 1/sigma = 0.1, 0.2, ..., 2.0."""
    return tuple(1.0 / (0.1 * i) for i in range(1, 21))


@dataclass
class Point:
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=float).reshape(-1)
        self.b = np.asarray(self.b, dtype=float).reshape(-1)

    def copy(self) -> "Point":
        return Point(self.a.copy(), self.b.copy())

    def flat(self) -> np.ndarray:
        return np.concatenate([self.a, self.b])

    def rounded(self) -> Assignment:
        # sgn(0) = +1 (False)
        return Assignment(np.where(self.a < 0, TRUE, -TRUE), self.b.copy())


@dataclass
class SolverConfig:
    eta: float = 0.1
    eta_mode: str = "lipschitz"
    eps: float = 1e-2
    schedule: tuple = field(default_factory=default_schedule)
    max_inner_iters: int = 1000
    restarts: int = 1
    seed: int = 0
    time_limit_s: float | None = None
    rho: float = 0.5
    gamma: float = 2.0
    tau: int = 1
    backend: str = "auto"
    erwa_reset_to: float = 1.0
    unit_atoms_in_objective: bool = True
    threads: int = 1

    def __post_init__(self):
        self.schedule = tuple(float(s) for s in self.schedule)
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if not self.schedule:
            raise ValueError("schedule must be non-empty")
        if any(s <= 0 for s in self.schedule) or any(x <= y for x, y in zip(self.schedule, self.schedule[1:])):
            raise ValueError("schedule must be positive and strictly decreasing in sigma")
        if not 0 < self.rho < 1:
            raise ValueError("rho must lie in (0, 1)")
        if not self.gamma > 1:
            raise ValueError("gamma must exceed 1")
        if self.tau < 1 or self.max_inner_iters < 1 or self.restarts < 1:
            raise ValueError("tau, max_inner_iters and restarts must be >= 1")
        if self.eta_mode not in ("fixed", "lipschitz", "armijo"):
            raise ValueError(f"unknown eta_mode {self.eta_mode!r}")
        if self.eta_mode != "lipschitz" and not self.eta > 0:
            raise ValueError("eta must be positive")
        if self.backend not in ("auto", "xbdd", "symmetric"):
            raise ValueError(f"unknown backend {self.backend!r}")

    def digest(self) -> str:
        return hashlib.sha1(json.dumps(asdict(self), sort_keys=True, default=str).encode()).hexdigest()[:12]


@dataclass
class WeightState:
    w: np.ndarray
    h: np.ndarray

    @classmethod
    def initial(cls, f: Formula) -> "WeightState":
        w = np.array([c.weight for c in f.constraints], dtype=float)
        return cls(w, np.zeros_like(w))

    def update(self, violated: np.ndarray, stage: int, cfg: SolverConfig):
        """ERWA step after stage ``stage`` (0-based)."""
        self.h = cfg.rho * self.h + violated.astype(float)
        if (stage + 1) % cfg.tau == 0:
            self.w = self.w * cfg.gamma ** self.h
            self.h = np.full_like(self.h, cfg.erwa_reset_to)
            top = self.w.max(initial=0.0)
            if top > WEIGHT_CAP:
                self.w = self.w * (WEIGHT_CAP / top)

    def digest(self) -> str:
        return hashlib.sha1(self.w.tobytes()).hexdigest()[:12]


@dataclass
class Sat:
    assignment: Assignment
    stats: dict = field(default_factory=dict)


@dataclass
class Unknown:
    best: Assignment | None
    unsat_count: int
    stats: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# objective and gradient


class Relaxation:
    """Compiled per-constraint evaluators for one formula.

    The relaxed vector seen by the diagrams is ``v = (a, d)``: Booleans first,
    then one smoothed value per atom.
    """

    def __init__(self, f: Formula, backend: str = "auto", node_budget: int = xbdd.DEFAULT_NODE_BUDGET,
                 unit_atoms_in_objective: bool = True):
        self.f = f
        self.n, self.m, self.k = f.n_bool, f.n_real, f.k_total
        self.atoms = AtomMatrix(f)
        self.mask = np.ones(len(f.constraints))
        if not unit_atoms_in_objective:
            for i, c in enumerate(f.constraints):
                if c.unit_atom is not None:
                    self.mask[i] = 0.0
        diagrams, var_index, rows = [], [], []
        # symmetric rows: (constraint row, kind, k, global var ids, signs)
        self.sym_rows = []
        for i, c in enumerate(f.constraints):
            slots = constraint_slots(c)
            gidx = np.array([s.index if s.kind == "b" else self.n + s.index for s in slots], dtype=np.int64)
            sign = np.array([-1.0 if s.negated else 1.0 for s in slots])
            literal_level = isinstance(c.body, Symmetric) and len(slots) == len(c.body.literals)
            if backend == "symmetric" and literal_level:
                self.sym_rows.append((i, c.body.kind, c.body.k, gidx, sign))
                continue
            try:
                d = xbdd.compile(c, node_budget=node_budget)
            except xbdd.NodeBudgetExceeded:
                if backend == "auto" and literal_level:
                    self.sym_rows.append((i, c.body.kind, c.body.k, gidx, sign))
                    continue
                raise
            diagrams.append(d)
            var_index.append(gidx)
            rows.append(i)
        self.diagrams = diagrams
        self.diag_rows = np.array(rows, dtype=np.int64)
        self.batch = xbdd.DiagramBatch.build(diagrams, var_index, self.n + self.k) if diagrams else None

    def relaxed(self, a, b, sigma: float):
        if sigma == 0:
            return np.concatenate([a, self.atoms.exact(b)]), None
        d, dz = self.atoms.smooth_and_dz(b, sigma)
        return np.concatenate([a, d]), dz

    def sat_probs(self, a, b, sigma: float) -> np.ndarray:
        v, _ = self.relaxed(np.asarray(a, float), np.asarray(b, float), sigma)
        sat = np.zeros(len(self.f.constraints))
        if self.batch is not None:
            sat[self.diag_rows], _, _ = self.batch.forward(v)
        for i, kind, k, gidx, sign in self.sym_rows:
            sat[i], _ = xbdd.symmetric_cop(kind, k, (1.0 - sign * v[gidx]) / 2.0)
        return sat

    def value(self, a, b, sigma: float, w) -> float:
        sat = self.sat_probs(a, b, sigma)
        return float(np.dot(np.asarray(w) * self.mask, 1.0 - 2.0 * sat))

    def value_and_grad(self, a, b, sigma: float, w):
        if not sigma > 0:
            raise ValueError("gradient needs sigma > 0")
        a = np.asarray(a, float)
        b = np.asarray(b, float)
        wm = np.asarray(w, float) * self.mask
        v, dz = self.relaxed(a, b, sigma)
        gv = np.zeros(self.n + self.k)
        obj = 0.0
        if self.batch is not None:
            sat, m_td, p = self.batch.forward(v)
            rw = wm[self.diag_rows]
            obj += float(np.dot(rw, 1.0 - 2.0 * sat))
            gv += self.batch.backward(m_td, p, rw)
        for i, kind, k, gidx, sign in self.sym_rows:
            s, gp = xbdd.symmetric_cop(kind, k, (1.0 - sign * v[gidx]) / 2.0)
            obj += wm[i] * (1.0 - 2.0 * s)
            # d(1 - 2 sat)/dv = -2 gp * (-sign / 2)
            np.add.at(gv, gidx, wm[i] * sign * gp)
        ga = gv[: self.n]
        gb = self.atoms.pullback(gv[self.n:], dz) if self.m else np.zeros(0)
        return obj, ga, np.asarray(gb, dtype=float)


_CACHE: dict[tuple, tuple[Formula, Relaxation]] = {}


def relaxation_for(f: Formula, backend: str = "auto", unit_atoms_in_objective: bool = True) -> Relaxation:
    key = (id(f), backend, unit_atoms_in_objective)
    hit = _CACHE.get(key)
    if hit is not None and hit[0] is f:
        return hit[1]
    if len(_CACHE) > 16:
        _CACHE.clear()
    r = Relaxation(f, backend, unit_atoms_in_objective=unit_atoms_in_objective)
    _CACHE[key] = (f, r)
    return r


def _weights(f: Formula, w):
    return np.array([c.weight for c in f.constraints], float) if w is None else np.asarray(w, float)


def objective(f: Formula, pt: Point, sigma: float, w=None, backend: str = "auto") -> float:
    """sum_c w_c (1 - 2 P[c satisfied]) under rounding of a and smoothing of the atoms."""
    return relaxation_for(f, backend).value(pt.a, pt.b, sigma, _weights(f, w))


def gradient(f: Formula, pt: Point, sigma: float, w=None, backend: str = "auto"):
    _, ga, gb = relaxation_for(f, backend).value_and_grad(pt.a, pt.b, sigma, _weights(f, w))
    return ga, gb


# ---------------------------------------------------------------------------
# projection


class Projector:
    """Euclidean projection onto [-1, 1]^n x {b : unit-atom halfspaces}.

    Single-variable halfspaces become per-coordinate bounds (exact clip);
    the remaining halfspaces are handled by Dykstra's algorithm with the
    bound box as one of the sets.  Strict atoms are projected onto their
    closure.  With ``exact_fallback`` a Dykstra run that exhausts its sweeps
    is replaced by the exact active-set solution (:meth:`active_set`);
    ``method="active_set"`` goes there directly, warm-started from the
    previous result.
    """

    def __init__(self, unit_atoms, m: int, tol: float = 1e-10, max_sweeps: int = 10_000,
                 exact_fallback: bool = False, method: str = "dykstra"):
        if method not in ("dykstra", "active_set"):
            raise ValueError(f"unknown projection method {method!r}")
        self.m = m
        self.method = method
        self._last = None
        self.tol = tol
        self.max_sweeps = max_sweeps
        self.exact_fallback = exact_fallback
        self.lo = np.full(m, -np.inf)
        self.hi = np.full(m, np.inf)
        normals, rhs = [], []
        for at in unit_atoms:
            if len(at.coeffs) == 1:
                (j, q), = at.coeffs
                bound = at.rhs / q
                if q > 0:
                    self.hi[j] = min(self.hi[j], bound)
                else:
                    self.lo[j] = max(self.lo[j], bound)
            else:
                vec = np.zeros(m)
                for j, q in at.coeffs:
                    vec[j] = q
                normals.append(vec)
                rhs.append(at.rhs)
        self.Q = np.array(normals).reshape(len(normals), m)
        self.r = np.array(rhs, dtype=float)
        self.qq = np.einsum("ij,ij->i", self.Q, self.Q)
        self.has_box = bool(np.isfinite(self.lo).any() or np.isfinite(self.hi).any())
        self._A, self._c = self._rows()

    def _halfspace(self, i: int, x: np.ndarray) -> np.ndarray:
        viol = self.Q[i] @ x - self.r[i]
        if viol <= 0:
            return x
        return x - (viol / self.qq[i]) * self.Q[i]

    def _box(self, x: np.ndarray) -> np.ndarray:
        return np.minimum(np.maximum(x, self.lo), self.hi)

    def feasible(self, x, tol: float = 0.0) -> bool:
        x = np.asarray(x, float)
        if np.any(x < self.lo - tol) or np.any(x > self.hi + tol):
            return False
        return bool(np.all(self.Q @ x - self.r <= tol)) if len(self.r) else True

    def project_b(self, b) -> np.ndarray:
        x = np.asarray(b, dtype=float).copy()
        n_h = len(self.r)
        if n_h == 0:
            return self._box(x)
        if n_h == 1 and not self.has_box:
            return self._halfspace(0, x)
        if self.feasible(x):
            return x
        if self.method == "active_set":
            # warm start from the previous projection, which is feasible
            exact = self.active_set(b, self._last)
            if exact is not None:
                self._last = exact
                return exact.copy()
        sets = ([self._box] if self.has_box else []) + [
            (lambda z, i=i: self._halfspace(i, z)) for i in range(n_h)]
        incr = [np.zeros_like(x) for _ in sets]
        for _ in range(self.max_sweeps):
            prev = x
            moved = 0.0
            for s, proj in enumerate(sets):
                y = proj(x + incr[s])
                new = x + incr[s] - y
                # x can stall while the increments still drift, so watch both
                moved += float(np.sum((new - incr[s]) ** 2))
                incr[s] = new
                x = y
            if (np.linalg.norm(x - prev) <= self.tol and np.sqrt(moved) <= self.tol
                    and self.feasible(x, self.tol)):
                return x
        if self.exact_fallback:
            exact = self.active_set(b, x)
            if exact is not None:
                return exact
        warnings.warn(f"Dykstra did not converge in {self.max_sweeps} sweeps", DykstraNonConvergence)
        return x

    def _rows(self):
        eye = np.eye(self.m)
        up, dn = np.isfinite(self.hi), np.isfinite(self.lo)
        A = np.vstack([self.Q, eye[up], -eye[dn]])
        c = np.concatenate([self.r, self.hi[up], -self.lo[dn]])
        scale = np.linalg.norm(A, axis=1)
        return A / scale[:, None], c / scale

    def active_set(self, z, x0=None, max_iter: int = 10_000) -> np.ndarray | None:
        """Exact projection by the primal active-set method.

        Starts from ``x0`` when it is feasible to 1e-9, otherwise from a
        feasible point found by linear programming.  Returns None when the
        set is empty.
        """
        z = np.asarray(z, dtype=float)
        A, c = self._A, self._c
        if x0 is None or np.max(A @ x0 - c, initial=-np.inf) > 1e-9:
            lp = linprog(np.zeros(self.m), A_ub=A, b_ub=c, bounds=[(None, None)] * self.m, method="highs")
            if lp.status != 0:
                return None
            x0 = lp.x
        x = np.asarray(x0, dtype=float).copy()
        work: list[int] = []
        for i in np.flatnonzero(A @ x - c >= -1e-12):
            if _independent(A, work, i):
                work.append(int(i))
        for _ in range(max_iter):
            g = x - z
            if work:
                # orthonormal basis of the active normals keeps the step in their null space
                Qw, Rw = np.linalg.qr(A[work].T)
                p = -(g - Qw @ (Qw.T @ g))
                lam = np.linalg.lstsq(Rw, -(Qw.T @ g), rcond=None)[0]
            else:
                lam, p = np.zeros(0), -g
            if np.linalg.norm(p) <= 1e-13 * max(1.0, np.linalg.norm(g)):
                if len(lam) == 0 or lam.min() >= -1e-13:
                    return x
                work.pop(int(np.argmin(lam)))
                continue
            Ap = A @ p
            slack = c - A @ x
            alpha, block = 1.0, None
            for i in np.flatnonzero(Ap > 1e-12 * np.linalg.norm(p)):
                if i in work:
                    continue
                t = max(slack[i], 0.0) / Ap[i]
                if t < alpha:
                    alpha, block = t, int(i)
            x = x + alpha * p
            if block is not None and _independent(A, work, block):
                work.append(block)
        return x

    def __call__(self, a, b) -> Point:
        return Point(np.clip(np.asarray(a, float), -1.0, 1.0), self.project_b(b))


def _independent(A, work, i) -> bool:
    if not work:
        return True
    Qw, _ = np.linalg.qr(A[work].T)
    return bool(np.linalg.norm(A[i] - Qw @ (Qw.T @ A[i])) > 1e-10)


def project(raw_a, raw_b, unit_atoms=(), **kw) -> Point:
    raw_b = np.asarray(raw_b, dtype=float).reshape(-1)
    return Projector(unit_atoms, len(raw_b), **kw)(raw_a, raw_b)


def projector_for(f: Formula) -> Projector:
    """Projector used inside the solver: warm-started active set, Dykstra as a backstop."""
    return Projector(f.unit_atoms, f.n_real, max_sweeps=200, method="active_set")


def grad_mapping(f: Formula, pt: Point, sigma: float, w, eta: float, backend: str = "auto",
                 projector: Projector | None = None) -> np.ndarray:
    if not eta > 0:
        raise ValueError("eta must be positive")
    proj = projector or projector_for(f)
    ga, gb = gradient(f, pt, sigma, w, backend)
    nxt = proj(pt.a - eta * ga, pt.b - eta * gb)
    return (pt.flat() - nxt.flat()) / eta


# ---------------------------------------------------------------------------
# step size


def atom_occurrence_beta(f: Formula) -> int:
    """Max over constraints of the number of distinct atoms in it sharing one real variable."""
    beta = 0
    for c in f.constraints:
        count: dict[int, int] = {}
        for aid in {l.index for l in c.literals if l.kind == "a"}:
            for j, _ in f.atoms[aid].coeffs:
                count[j] = count.get(j, 0) + 1
        beta = max(beta, max(count.values(), default=0))
    return beta


def lipschitz_constants(f: Formula, sigma: float, w=None) -> tuple[float, float]:
    """(rho_L, L): Lipschitz constants of the smoothed objective and of its gradient."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    alpha = float(np.sum(_weights(f, w)))
    n, m = f.n_bool, f.n_real
    g = SQRT2 * atom_occurrence_beta(f) / (SQRT_PI * sigma)
    rho = alpha * np.sqrt(n + m) * max(1.0, g)
    L = np.sqrt(n + m * g * g) * rho
    return float(rho), float(L)


# ---------------------------------------------------------------------------
# descent


@dataclass
class Descent:
    point: Point
    iters: int
    converged: bool
    grad_norm: float
    objective: float
    eta: float


def descend(f: Formula, start: Point, sigma: float, w, cfg: SolverConfig, projector: Projector | None = None,
            relax: Relaxation | None = None, deadline: float | None = None,
            on_step: Callable[[Point, float], None] | None = None) -> Descent:
    """Projected gradient descent until ||g||^2 <= eps^2 or the iteration cap.

    ``on_step`` sees every iterate with its objective value, the start
    included.  With ``eta_mode="armijo"`` the step is found by backtracking
    (doubling after each accepted step) until the usual sufficient-decrease
    test for projected steps holds; the stopping test then uses the
    gradient mapping at the reference step ``cfg.eta``.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    relax = relax or relaxation_for(f, cfg.backend, cfg.unit_atoms_in_objective)
    proj = projector or projector_for(f)
    w = _weights(f, w)
    if cfg.eta_mode == "lipschitz":
        L = lipschitz_constants(f, sigma, w)[1]
        eta = 1.0 / L if L > 0 else 1.0
    else:
        eta = cfg.eta
    pt = start.copy()
    eps2 = cfg.eps**2
    gn2, obj, iters = np.inf, np.nan, 0
    while iters < cfg.max_inner_iters:
        iters += 1
        obj, ga, gb = relax.value_and_grad(pt.a, pt.b, sigma, w)
        if on_step is not None:
            on_step(pt, obj)
        grad = np.concatenate([ga, gb])
        while True:
            nxt = proj(pt.a - eta * ga, pt.b - eta * gb)
            step = nxt.flat() - pt.flat()
            if cfg.eta_mode != "armijo" or eta < 1e-300:
                break
            bound = obj + grad @ step + (step @ step) / (2.0 * eta)
            if relax.value(nxt.a, nxt.b, sigma, w) <= bound + 1e-12 * max(1.0, abs(obj)):
                break
            eta *= 0.5
        if cfg.eta_mode == "armijo":
            # criticality is measured at the reference step, not the (growing) accepted one
            ref = proj(pt.a - cfg.eta * ga, pt.b - cfg.eta * gb).flat() - pt.flat()
            gn2 = float(ref @ ref) / cfg.eta**2
        else:
            gn2 = float(step @ step) / eta**2
        if gn2 <= eps2:
            return Descent(pt, iters, True, float(np.sqrt(gn2)), obj, eta)
        pt = nxt
        if cfg.eta_mode == "armijo":
            eta *= 2.0
        if deadline is not None and time.monotonic() > deadline:
            break
    return Descent(pt, iters, False, float(np.sqrt(gn2)), obj, eta)


def pgd(f: Formula, start: Point, sigma: float, w, cfg: SolverConfig, projector: Projector | None = None,
        relax: Relaxation | None = None, deadline: float | None = None,
        on_step: Callable[[Point, float], None] | None = None):
    """Returns (point, iterations, converged); see :func:`descend`."""
    r = descend(f, start, sigma, w, cfg, projector, relax, deadline, on_step)
    return r.point, r.iters, r.converged


def random_start(f: Formula, rng: np.random.Generator, projector: Projector | None = None) -> Point:
    a = rng.uniform(-1.0, 1.0, f.n_bool)
    b = rng.standard_normal(f.n_real)
    return (projector or projector_for(f))(a, b)


def _single_run(f: Formula, cfg: SolverConfig, restart: int, deadline: float | None,
                start: Point | None = None, log: Callable[[dict], None] | None = None):
    rng = np.random.default_rng([cfg.seed, restart])
    relax = relaxation_for(f, cfg.backend, cfg.unit_atoms_in_objective)
    proj = projector_for(f)
    pt = start.copy() if start is not None else random_start(f, rng, proj)
    ws = WeightState.initial(f)
    best, best_unsat = None, len(f.constraints) + 1
    for stage, sigma in enumerate(cfg.schedule):
        t0 = time.monotonic()
        res = descend(f, pt, sigma, ws.w, cfg, proj, relax, deadline)
        pt = res.point
        asg = pt.rounded()
        obj, flags = eval_formula(f, asg)
        violated = ~np.array(flags, dtype=bool)
        n_unsat = int(violated.sum())
        if n_unsat < best_unsat:
            best, best_unsat = asg, n_unsat
        if log is not None:
            log({"restart": restart, "stage": stage, "sigma": sigma, "iters": res.iters,
                 "grad_norm": res.grad_norm, "objective": res.objective, "unsat_count": n_unsat,
                 "weights_digest": ws.digest(), "wall_ms": round(1000 * (time.monotonic() - t0), 3)})
        if n_unsat == 0:
            return Sat(asg, {"restart": restart, "stage": stage})
        if deadline is not None and time.monotonic() > deadline:
            break
        ws.update(violated, stage, cfg)
    return Unknown(best, best_unsat, {"restart": restart})


def _run_restart(args):
    f, cfg, r, deadline = args
    logs = []
    res = _single_run(f, cfg, r, deadline, log=logs.append)
    return res, logs


def anneal_solve(f: Formula, cfg: SolverConfig | None = None, log: Callable[[dict], None] | None = None,
                 start: Point | None = None):
    """Annealed continuous local search.  Returns :class:`Sat` or :class:`Unknown`.

    Restarts use independent streams ``default_rng([seed, r])``; the Sat of
    the lowest restart index wins.  ``start`` overrides the random start of
    restart 0.
    """
    cfg = cfg or SolverConfig()
    deadline = None if cfg.time_limit_s is None else time.monotonic() + cfg.time_limit_s
    results = []
    if cfg.threads > 1 and cfg.restarts > 1 and start is None:
        with ProcessPoolExecutor(max_workers=cfg.threads) as ex:
            for res, logs in ex.map(_run_restart, [(f, cfg, r, deadline) for r in range(cfg.restarts)]):
                if log is not None:
                    for rec in logs:
                        log(rec)
                results.append(res)
                if isinstance(res, Sat):
                    break
    else:
        for r in range(cfg.restarts):
            res = _single_run(f, cfg, r, deadline, start if r == 0 else None, log)
            results.append(res)
            if isinstance(res, Sat):
                break
            if deadline is not None and time.monotonic() > deadline:
                break
    for res in results:
        if isinstance(res, Sat):
            return res
    best = min(results, key=lambda u: u.unsat_count)
    timed_out = deadline is not None and time.monotonic() > deadline
    return Unknown(best.best, best.unsat_count, {"restarts": len(results), "timeout": timed_out})


def anneal_trajectory(f: Formula, start: Point, cfg: SolverConfig, w=None):
    """Every iterate of the annealed descent with fixed weights (no rounding checks).

    Returns a list of (sigma, a, b, objective) tuples.
    """
    relax = relaxation_for(f, cfg.backend, cfg.unit_atoms_in_objective)
    proj = projector_for(f)
    w = _weights(f, w)
    path = []
    pt = start.copy()
    for sigma in cfg.schedule:
        pt, _, _ = pgd(f, pt, sigma, w, cfg, proj, relax,
                       on_step=lambda p, o, s=sigma: path.append((s, p.a.copy(), p.b.copy(), o)))
    return path
