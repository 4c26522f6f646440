import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fsmt import xbdd
from fsmt.benchgen import gen_small_random
from fsmt.model import Constraint, Literal, Op, Symmetric, a, b, constraint_slots, slot_function


def test_or_forward_backward():
    d = xbdd.compile(Constraint(Symmetric("or", (b(0), b(1)))))
    msgs, sat = xbdd.forward(d, [0.5, 0.5])
    assert sat == 0.75
    assert np.allclose(xbdd.backward(d, msgs, [0.5, 0.5]), [0.5, 0.5], atol=0)


def test_xor_gradient():
    d = xbdd.compile(Constraint(Symmetric("xor", (b(0), b(1)))))
    msgs, sat = xbdd.forward(d, [0.3, 0.5])
    assert sat == pytest.approx(0.5, abs=1e-15)
    assert np.allclose(xbdd.backward(d, msgs, [0.3, 0.5]), [0.0, 0.4], atol=1e-15)


def test_xor_width_two():
    d = xbdd.compile(Constraint(Symmetric("xor", tuple(b(i) for i in range(8)))))
    # one node on the first level, two (parity 0/1) on each later level
    assert d.n_nodes == 15


def test_stale_messages():
    d = xbdd.compile(Constraint(Symmetric("or", (b(0), b(1)))))
    msgs, _ = xbdd.forward(d, [0.2, 0.5])
    with pytest.raises(xbdd.StaleMessages):
        xbdd.backward(d, msgs, [0.3, 0.5])


def test_node_budget():
    c = Constraint(Symmetric("card", tuple(b(i) for i in range(40)), 20))
    with pytest.raises(xbdd.NodeBudgetExceeded):
        xbdd.compile(c, node_budget=50)


def test_constant_diagrams():
    tauto = xbdd.compile(Constraint(Symmetric("xor", (b(0), Literal("b", 0, True)))))
    assert tauto.n_nodes == 0 and tauto.root == tauto.TRUE
    assert xbdd.forward(tauto, [0.3])[1] == 1.0


def _vertices(n):
    return [np.array(bits, dtype=bool) for bits in itertools.product((False, True), repeat=n)]


@given(st.integers(0, 5000))
def test_diagram_matches_truth_table_and_is_reduced(seed):
    f = gen_small_random(seed)
    for c in f.constraints:
        d = xbdd.compile(c)
        g = slot_function(c, d.slots)
        for T in _vertices(len(d.slots)):
            assert d.evaluate(T) == bool(g(T[None, :])[0])
            _, sat = xbdd.forward(d, T.astype(float))
            assert sat == float(bool(g(T[None, :])[0]))
        table = d.node_table()
        assert len(set(table)) == len(table)
        assert all(lo != hi for _, lo, hi in table)


@given(st.integers(0, 5000), st.integers(0, 2**32 - 1))
def test_gradient_is_exact_difference(seed, pseed):
    # the satisfaction probability is affine in each p_s
    rng = np.random.default_rng(pseed)
    for c in gen_small_random(seed).constraints:
        d = xbdd.compile(c)
        p = rng.random(len(d.slots))
        msgs, s0 = xbdd.forward(d, p)
        g = xbdd.backward(d, msgs, p)
        for s in range(len(p)):
            hi, lo = p.copy(), p.copy()
            hi[s], lo[s] = 1.0, 0.0
            assert g[s] == pytest.approx(xbdd.forward(d, hi)[1] - xbdd.forward(d, lo)[1], abs=1e-12)


@given(st.integers(0, 5000), st.integers(0, 2**32 - 1))
def test_order_does_not_change_probability(seed, pseed):
    rng = np.random.default_rng(pseed)
    for c in gen_small_random(seed).constraints:
        slots = constraint_slots(c)
        perm = [slots[i] for i in rng.permutation(len(slots))]
        p = rng.random(len(slots))
        d0, d1 = xbdd.compile(c), xbdd.compile(c, order=perm)
        p1 = np.array([p[slots.index(s)] for s in perm])
        assert xbdd.forward(d0, p)[1] == pytest.approx(xbdd.forward(d1, p1)[1], abs=1e-12)


def test_bad_order_rejected():
    c = Constraint(Symmetric("or", (b(0), b(1))))
    with pytest.raises(ValueError):
        xbdd.compile(c, order=constraint_slots(c)[:1])


@given(st.integers(0, 5000), st.integers(0, 2**32 - 1))
def test_batch_matches_single_diagrams(seed, pseed):
    f = gen_small_random(seed)
    rng = np.random.default_rng(pseed)
    n = f.n_bool
    ds, vmaps = [], []
    for c in f.constraints:
        d = xbdd.compile(c)
        ds.append(d)
        vmaps.append(np.array([s.index if s.kind == "b" else n + s.index for s in d.slots]))
    batch = xbdd.DiagramBatch.build(ds, vmaps, n + f.k_total)
    v = rng.uniform(-1, 1, n + f.k_total)
    w = rng.uniform(0.5, 2.0, len(ds))
    sat, m_td, p = batch.forward(v)
    grad = batch.backward(m_td, p, w)
    expect = np.zeros_like(v)
    for r, (d, vm) in enumerate(zip(ds, vmaps)):
        sign = np.array([-1.0 if s.negated else 1.0 for s in d.slots])
        ps = (1.0 - sign * v[vm]) / 2.0
        msgs, s = xbdd.forward(d, ps)
        assert sat[r] == pytest.approx(s, abs=1e-13)
        np.add.at(expect, vm, w[r] * sign * xbdd.backward(d, msgs, ps))
    assert np.allclose(grad, expect, atol=1e-12)


def test_expression_diagram():
    c = Constraint(Op("and", (b(0), a(0))))
    d = xbdd.compile(c)
    assert xbdd.forward(d, [0.5, 0.4])[1] == pytest.approx(0.2)


def test_dot_output():
    text = xbdd.to_dot(xbdd.compile(Constraint(Symmetric("or", (b(0), Literal("a", 1, True))))))
    assert text.startswith("digraph") and "~a1" in text and text.count("->") == 4
