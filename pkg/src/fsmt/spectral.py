"""Reference oracles: Walsh-Fourier tables, Monte-Carlo expectations, brute-force SAT.

Everything here is exponential by design and guarded by explicit limits.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .model import (FALSE, TRUE, Assignment, Constraint, Formula, Slot, atom_truth_matrix,
                    constraint_sat_batch, constraint_slots, eval_formula, slot_function)

MAX_WFE_SLOTS = 20
MAX_FM_VARS = 12
BRUTE_LIMITS = {"n_bool": 16, "n_real": 12, "k_total": 16}


class SlotLimitExceeded(ValueError):
    pass


class VariableLimitExceeded(ValueError):
    pass


class OracleLimitExceeded(ValueError):
    pass


@dataclass
class WfeTable:
    """Sparse xWFE coefficients keyed by (Boolean-slot mask, atom-slot mask)."""

    entries: dict[tuple[int, int], float]
    n_bool_slots: int
    n_atom_slots: int
    slots: tuple[Slot, ...] = ()

    def parseval(self) -> float:
        return float(sum(v * v for v in self.entries.values()))


def _fwht(values: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform along the last axis (length 2^N)."""
    h = values.astype(float).copy()
    n = h.shape[-1]
    step = 1
    while step < n:
        h = h.reshape(-1, n // (2 * step), 2, step)
        lo, hi = h[:, :, 0, :].copy(), h[:, :, 1, :].copy()
        h[:, :, 0, :] = lo + hi
        h[:, :, 1, :] = lo - hi
        h = h.reshape(-1, n)
        step *= 2
    return h.reshape(values.shape)


def vertex_values(c: Constraint, slots: Sequence[Slot] | None = None) -> np.ndarray:
    """f_c over all slot vertices.  Bit s of the row index set <=> slot s at -1 (True)."""
    slots = constraint_slots(c) if slots is None else tuple(slots)
    N = len(slots)
    idx = np.arange(2**N)
    T = ((idx[:, None] >> np.arange(N)[None, :]) & 1).astype(bool)
    sat = slot_function(c, slots)(T)
    return np.where(sat, TRUE, FALSE).astype(float)


def wfe_coefficients(c: Constraint) -> WfeTable:
    slots = constraint_slots(c)
    N = len(slots)
    if N > MAX_WFE_SLOTS:
        raise SlotLimitExceeded(f"{N} slots > {MAX_WFE_SLOTS}")
    n_b = sum(s.kind == "b" for s in slots)
    f = vertex_values(c, slots)
    # coefficient(U) = E_z[f(z) prod_{i in U} z_i] with z_i = -1 exactly when bit i is set,
    # which is the Hadamard transform with (-1)^{|row & U|} signs
    coef = _fwht(f) / 2**N
    low = (1 << n_b) - 1
    entries = {(int(U) & low, int(U) >> n_b): float(v) for U, v in enumerate(coef) if v != 0.0}
    return WfeTable(entries, n_b, N - n_b, slots)


def xwfe_expectation(table: WfeTable, a_slots, d_slots) -> float:
    a_slots = np.asarray(a_slots, dtype=float).reshape(-1)
    d_slots = np.asarray(d_slots, dtype=float).reshape(-1)
    if len(a_slots) != table.n_bool_slots or len(d_slots) != table.n_atom_slots:
        raise ValueError("slot vectors do not match the table dimensions")
    total = 0.0
    for (S, T), coef in table.entries.items():
        term = coef
        i = 0
        while S >> i:
            if (S >> i) & 1:
                term *= a_slots[i]
            i += 1
        i = 0
        while T >> i:
            if (T >> i) & 1:
                term *= d_slots[i]
            i += 1
        total += term
    return float(total)


def slot_relaxed_values(slots: Sequence[Slot], a, d) -> tuple[np.ndarray, np.ndarray]:
    """Relaxed slot values (Boolean slots, atom slots); negated slots flip sign."""
    av = [(-1.0 if s.negated else 1.0) * a[s.index] for s in slots if s.kind == "b"]
    dv = [(-1.0 if s.negated else 1.0) * d[s.index] for s in slots if s.kind == "a"]
    return np.array(av, dtype=float), np.array(dv, dtype=float)


def mc_expectation(c: Constraint, f: Formula, a, b, sigma: float, samples: int, seed) -> tuple[float, float]:
    """Monte-Carlo estimate of E[f_c] under rounding of ``a`` and y ~ N(b, sigma^2 I).

    Returns (mean, standard error).
    """
    if sigma < 0 or samples < 1:
        raise ValueError("need sigma >= 0 and samples >= 1")
    rng = np.random.default_rng(seed)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    chunk = 200_000
    total, total_sq, done = 0.0, 0.0, 0
    while done < samples:
        n = min(chunk, samples - done)
        Xtrue = rng.random((n, f.n_bool)) < (1.0 - a) / 2.0
        if sigma > 0:
            Y = b + sigma * rng.standard_normal((n, f.n_real))
        else:
            Y = np.broadcast_to(b, (n, f.n_real))
        vals = np.where(constraint_sat_batch(c, Xtrue, atom_truth_matrix(f, Y)), TRUE, FALSE)
        total += vals.sum()
        total_sq += (vals.astype(float) ** 2).sum()
        done += n
    mean = total / samples
    if samples > 1:
        var = max(total_sq / samples - mean**2, 0.0) * samples / (samples - 1)
        se = float(np.sqrt(var / samples))
    else:
        se = 0.0
    return float(mean), se


# ---------------------------------------------------------------------------
# Fourier-Motzkin


@dataclass
class Feasible:
    witness: np.ndarray


class Infeasible:
    def __repr__(self):
        return "Infeasible()"


def _fm_bounds(rows, j):
    """Split rows into (lower, upper, rest) with respect to variable j."""
    lower, upper, rest = [], [], []
    for coeffs, rhs, strict in rows:
        q = coeffs.get(j, 0)
        if q > 0:
            upper.append((coeffs, rhs, strict))
        elif q < 0:
            lower.append((coeffs, rhs, strict))
        else:
            rest.append((coeffs, rhs, strict))
    return lower, upper, rest


def fm_feasible(ineqs, n_vars: int | None = None):
    """Exact rational feasibility of ``{q.y <= rhs (or < when strict)}``.

    ``ineqs`` is a sequence of (coeffs, rhs, strict) with coeffs a mapping
    j -> q.  Returns :class:`Feasible` with a float witness that satisfies
    every row under float evaluation, or :class:`Infeasible`.
    """
    rows = []
    for coeffs, rhs, strict in ineqs:
        cf = {int(j): Fraction(q) for j, q in dict(coeffs).items() if q != 0}
        rows.append((cf, Fraction(rhs), bool(strict)))
    used = sorted({j for cf, _, _ in rows for j in cf})
    if n_vars is None:
        n_vars = (max(used) + 1) if used else 0
    if len(used) > MAX_FM_VARS:
        raise VariableLimitExceeded(f"{len(used)} variables > {MAX_FM_VARS}")

    stages = []
    current = rows
    for j in used:
        lower, upper, rest = _fm_bounds(current, j)
        stages.append((j, lower, upper))
        combined = []
        for lc, lr, ls in lower:
            for uc, ur, us in upper:
                # scale so the j-coefficients cancel
                lam, mu = uc[j], -lc[j]
                cf = {}
                for k in set(lc) | set(uc):
                    if k == j:
                        continue
                    v = mu * uc.get(k, 0) + lam * lc.get(k, 0)
                    if v != 0:
                        cf[k] = v
                combined.append((cf, mu * ur + lam * lr, ls or us))
        current = rest + combined
        # drop trivially true rows; detect contradictions early
        kept = []
        for cf, r, s in current:
            if not cf:
                if (s and not 0 < r) or (not s and not 0 <= r):
                    return Infeasible()
                continue
            kept.append((cf, r, s))
        current = kept
    for cf, r, s in current:
        if (s and not 0 < r) or (not s and not 0 <= r):
            return Infeasible()

    # back-substitution in reverse elimination order
    val: dict[int, Fraction] = {}
    for j, lower, upper in reversed(stages):
        def bound(row):
            cf, r, s = row
            rest = r - sum(q * val[k] for k, q in cf.items() if k != j)
            return rest / cf[j], s

        lo = [bound(row) for row in lower]
        hi = [bound(row) for row in upper]
        lo_v = max((v for v, _ in lo), default=None)
        hi_v = min((v for v, _ in hi), default=None)
        val[j] = _interior(lo_v, hi_v)
    w = np.zeros(n_vars)
    for j, v in val.items():
        w[j] = float(v)
    return Feasible(w)


def _interior(lo, hi) -> Fraction:
    """A short dyadic strictly inside (lo, hi) when the interval is open, else the single point.

    Values off the bounds survive float rounding of the witness; bounds may be None.
    """
    if lo is not None and hi is not None and lo == hi:
        return lo
    if lo is None and hi is None:
        return Fraction(0)
    if hi is None:
        return Fraction(math.floor(lo) + 1)
    if lo is None:
        return Fraction(math.ceil(hi) - 1)
    if lo < 0 < hi:
        return Fraction(0)
    mid = (lo + hi) / 2
    for k in range(64):
        cand = Fraction(round(mid * 2**k), 2**k)
        if lo < cand < hi:
            return cand
    return mid


def _check_float(rows, y) -> bool:
    for coeffs, rhs, strict in rows:
        s = 0.0
        for j, q in sorted(dict(coeffs).items()):
            s += q * y[j]
        if (strict and not s < rhs) or (not strict and not s <= rhs):
            return False
    return True


# ---------------------------------------------------------------------------
# brute force


@dataclass
class Sat:
    assignment: Assignment


class Unsat:
    def __repr__(self):
        return "Unsat()"


def _signed_rows(f: Formula, atom_ids, pattern):
    rows = []
    for aid, holds in zip(atom_ids, pattern):
        at = f.atoms[aid]
        cf = dict(at.coeffs)
        if holds:
            rows.append((cf, at.rhs, at.strict))
        else:
            # not (q.y <= r)  ==  -q.y < -r ;  not (q.y < r)  ==  -q.y <= -r
            rows.append(({j: -q for j, q in cf.items()}, -at.rhs, not at.strict))
    return rows


def brute_force_sat(f: Formula):
    """Complete decision by enumerating Boolean vectors and atom truth patterns."""
    for key, lim in BRUTE_LIMITS.items():
        val = getattr(f, key)
        if val > lim:
            raise OracleLimitExceeded(f"{key}={val} exceeds oracle limit {lim}")
    used_atoms = sorted({l.index for c in f.constraints for l in c.literals if l.kind == "a"})
    k = len(used_atoms)
    n = f.n_bool
    Xtrue = ((np.arange(2**n)[:, None] >> np.arange(n)[None, :]) & 1).astype(bool)
    for pattern in itertools.product((True, False), repeat=k):
        Atrue = np.zeros((len(Xtrue), f.k_total), dtype=bool)
        for col, holds in zip(used_atoms, pattern):
            Atrue[:, col] = holds
        ok = np.ones(len(Xtrue), dtype=bool)
        for c in f.constraints:
            ok &= constraint_sat_batch(c, Xtrue, Atrue)
            if not ok.any():
                break
        if not ok.any():
            continue
        rows = _signed_rows(f, used_atoms, pattern)
        res = fm_feasible(rows, f.n_real) if rows else Feasible(np.zeros(f.n_real))
        if isinstance(res, Infeasible):
            continue
        y = res.witness
        if not _check_float(rows, y):
            # rational witness lost exactness in float; skip rather than report a bad model
            continue
        x = np.where(Xtrue[int(np.argmax(ok))], TRUE, FALSE)
        asg = Assignment(x, y)
        obj, sat = eval_formula(f, asg)
        if all(sat):
            return Sat(asg)
    return Unsat()
