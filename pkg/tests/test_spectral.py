import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from fsmt.benchgen import gen_small_random
from fsmt.model import (FALSE, TRUE, Assignment, Atom, Constraint, Formula, Literal, Symmetric, a, b,
                        constraint_slots, eval_formula, parse_instance)
from fsmt.spectral import (BRUTE_LIMITS, Feasible, Infeasible, OracleLimitExceeded, Sat, SlotLimitExceeded, Unsat,
                           VariableLimitExceeded, brute_force_sat, fm_feasible, mc_expectation, vertex_values,
                           wfe_coefficients, xwfe_expectation)

TWO = "p hsmt 1 1\na 0 > 0 0:1\nc xor 1 -b0 a0\ne 1 (and b0 a0)\n"


def test_or_coefficients():
    t = wfe_coefficients(Constraint(Symmetric("or", (b(0), b(1)))))
    # f = -1/2 + z0/2 + z1/2 + z0 z1 / 2
    assert t.entries == {(0, 0): -0.5, (1, 0): 0.5, (2, 0): 0.5, (3, 0): 0.5}
    assert xwfe_expectation(t, [0.0, 0.0], []) == -0.5


def test_mixed_table_splits_masks():
    t = wfe_coefficients(Constraint(Symmetric("xor", (b(0), a(0)))))
    assert t.n_bool_slots == 1 and t.n_atom_slots == 1
    # exactly one of two literals true <=> z0 z1 = -1
    assert t.entries == {(1, 1): 1.0}


@given(st.integers(0, 5000))
def test_parseval_and_vertex_reconstruction(seed):
    f = gen_small_random(seed)
    for c in f.constraints:
        t = wfe_coefficients(c)
        assert t.parseval() == pytest.approx(1.0, abs=1e-12)
        vals = vertex_values(c)
        N = len(constraint_slots(c))
        for U in range(2**N):
            z = np.where((U >> np.arange(N)) & 1, -1.0, 1.0)
            nb = t.n_bool_slots
            assert xwfe_expectation(t, z[:nb], z[nb:]) == pytest.approx(vals[U], abs=1e-12)


def test_slot_limit():
    c = Constraint(Symmetric("or", tuple(b(i) for i in range(21))))
    with pytest.raises(SlotLimitExceeded):
        wfe_coefficients(c)


def test_mc_expectation_vertex_is_exact():
    f = parse_instance(TWO)
    mean, se = mc_expectation(f.constraints[1], f, [-1.0], [1.0], 0.0, 100, seed=0)
    assert mean == -1.0 and se == 0.0


def test_mc_expectation_matches_closed_form():
    # P[b0 true] = 0.3, P[y0 > 0] = 1/2 at b = 0
    f = parse_instance(TWO)
    mean, se = mc_expectation(f.constraints[1], f, [0.4], [0.0], 1.0, 200_000, seed=1)
    exact = 1 - 2 * 0.3 * 0.5
    assert abs(mean - exact) < 4 * se


def test_fm_strictness():
    assert isinstance(fm_feasible([({0: 1}, 0, True), ({0: -1}, 0, False)]), Infeasible)
    res = fm_feasible([({0: 1}, 0, False), ({0: -1}, 0, False)])
    assert isinstance(res, Feasible) and res.witness[0] == 0.0
    res = fm_feasible([({0: -1}, 0, True), ({0: 1}, 1, True)])
    assert isinstance(res, Feasible) and res.witness[0] == 0.5
    # open ray: y0 > 3
    res = fm_feasible([({0: -1}, -3, True)])
    assert res.witness[0] > 3


def test_fm_variable_limit():
    rows = [({j: 1}, 0, False) for j in range(13)]
    with pytest.raises(VariableLimitExceeded):
        fm_feasible(rows)


@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.integers(1, 7))
def test_fm_agrees_with_lp(seed, n, k):
    rng = np.random.default_rng(seed)
    A = rng.integers(-3, 4, size=(k, n)).astype(float)
    c = rng.integers(-4, 5, size=k).astype(float)
    strict = rng.random(k) < 0.5
    rows = [({j: A[i, j] for j in range(n) if A[i, j]}, c[i], bool(strict[i])) for i in range(k)]
    rows = [r for r in rows if r[0]] or [({0: 1.0}, 10.0, False)]
    res = fm_feasible(rows, n)
    # margin LP: maximize t with A y + t [strict] <= c, t <= 1
    Ar = np.array([[r[0].get(j, 0.0) for j in range(n)] + [1.0 if r[2] else 0.0] for r in rows])
    cr = np.array([r[1] for r in rows])
    lp = linprog(np.r_[np.zeros(n), -1.0], A_ub=Ar, b_ub=cr, bounds=[(None, None)] * n + [(None, 1.0)],
                 method="highs")
    lp_feasible = lp.status == 0 and -lp.fun > 1e-9
    assert isinstance(res, Feasible) == lp_feasible
    if isinstance(res, Feasible):
        y = res.witness
        for cf, r, s in rows:
            lhs = sum(q * y[j] for j, q in cf.items())
            assert (lhs < r) if s else (lhs <= r)


def test_brute_force_examples():
    res = brute_force_sat(parse_instance(TWO))
    assert isinstance(res, Sat) and res.assignment.x[0] == TRUE and res.assignment.y[0] > 0
    contra = Formula(1, 0, (), [Constraint(Symmetric("or", (b(0),))), Constraint(Symmetric("or", (Literal("b", 0, True),)))])
    assert isinstance(brute_force_sat(contra), Unsat)
    # y0 <= 0 and y0 > 0 cannot both hold
    at = [Atom.make(0, {0: 1}, "<=", 0), Atom.make(1, {0: 1}, ">", 0)]
    f = Formula(0, 1, at, [Constraint(Symmetric("or", (a(0),))), Constraint(Symmetric("or", (a(1),)))])
    assert isinstance(brute_force_sat(f), Unsat)


def test_brute_force_limits():
    f = Formula(BRUTE_LIMITS["n_bool"] + 4, 0, (), [Constraint(Symmetric("or", (b(0),)))])
    with pytest.raises(OracleLimitExceeded):
        brute_force_sat(f)


@given(st.integers(0, 5000))
def test_brute_force_witnesses_are_models(seed):
    f = gen_small_random(seed)
    res = brute_force_sat(f)
    if isinstance(res, Sat):
        obj, flags = eval_formula(f, res.assignment)
        assert all(flags) and obj == -f.total_weight
    else:
        # random assignments never satisfy an instance the oracle calls unsat
        rng = np.random.default_rng(seed)
        for _ in range(50):
            asg = Assignment(rng.choice([TRUE, FALSE], f.n_bool), rng.normal(scale=3, size=f.n_real))
            assert not all(eval_formula(f, asg)[1])
