"""Ordered reduced decision diagrams over literal slots, and their output probability.

A diagram decides a constraint from the truth of its slots (Boolean
variables or atoms, see :func:`fsmt.model.constraint_slots`).  The hi edge of
a node is taken when the slot's literal is True.  Given per-slot
probabilities ``p[s] = P(slot s true)``, :func:`forward` returns the
probability that the constraint is satisfied and :func:`backward` its
derivative with respect to every ``p[s]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .model import Constraint, Literal, Op, Slot, Symmetric, constraint_slots

DEFAULT_NODE_BUDGET = 10**6


class NodeBudgetExceeded(RuntimeError):
    pass


class StaleMessages(ValueError):
    pass


# manager ids: 0 FALSE, 1 TRUE, decision nodes from 2
_F, _T = 0, 1


class _Manager:
    def __init__(self, budget: int):
        self.budget = budget
        self.level = [np.inf, np.inf]
        self.lo = [-1, -1]
        self.hi = [-1, -1]
        self.unique: dict[tuple[int, int, int], int] = {}
        self.cache: dict[tuple[str, int, int], int] = {}

    def mk(self, level: int, lo: int, hi: int) -> int:
        if lo == hi:
            return lo
        key = (level, lo, hi)
        u = self.unique.get(key)
        if u is None:
            if len(self.level) - 2 >= self.budget:
                raise NodeBudgetExceeded(f"diagram exceeds {self.budget} nodes")
            u = len(self.level)
            self.level.append(level)
            self.lo.append(lo)
            self.hi.append(hi)
            self.unique[key] = u
        return u

    def var(self, level: int, negated: bool = False) -> int:
        return self.mk(level, _T, _F) if negated else self.mk(level, _F, _T)

    def apply(self, op: str, u: int, v: int) -> int:
        if u <= 1 and v <= 1:
            if op == "and":
                return u & v
            if op == "or":
                return u | v
            return u ^ v
        if op == "and" and (u == _F or v == _F):
            return _F
        if op == "or" and (u == _T or v == _T):
            return _T
        if op in ("and", "or") and u == v:
            return u
        if u > v:  # all three ops commute
            u, v = v, u
        key = (op, u, v)
        r = self.cache.get(key)
        if r is not None:
            return r
        lu, lv = self.level[u], self.level[v]
        top = min(lu, lv)
        u0, u1 = (self.lo[u], self.hi[u]) if lu == top else (u, u)
        v0, v1 = (self.lo[v], self.hi[v]) if lv == top else (v, v)
        r = self.mk(top, self.apply(op, u0, v0), self.apply(op, u1, v1))
        self.cache[key] = r
        return r

    def neg(self, u: int) -> int:
        return self.apply("xor", u, _T)


@dataclass(frozen=True)
class Xbdd:
    """Reduced ordered diagram in topological order.

    Decision nodes are ``0..n-1`` (root first when non-constant); index ``n``
    is the FALSE terminal and ``n + 1`` the TRUE terminal.
    """

    slot: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    root: int
    slots: tuple[Slot, ...]

    @property
    def n_nodes(self) -> int:
        return len(self.slot)

    @property
    def FALSE(self) -> int:
        return len(self.slot)

    @property
    def TRUE(self) -> int:
        return len(self.slot) + 1

    def node_table(self) -> list[tuple[int, int, int]]:
        return list(zip(self.slot.tolist(), self.lo.tolist(), self.hi.tolist()))

    def evaluate(self, truths) -> bool:
        v = self.root
        while v < self.n_nodes:
            v = self.hi[v] if truths[self.slot[v]] else self.lo[v]
        return v == self.TRUE


def _extract(mgr: _Manager, root: int, slots) -> Xbdd:
    if root <= 1:
        term = {_F: 0, _T: 1}
        empty = np.zeros(0, dtype=np.int64)
        return Xbdd(empty, empty.copy(), empty.copy(), term[root], tuple(slots))
    seen, stack = set(), [root]
    while stack:
        u = stack.pop()
        if u <= 1 or u in seen:
            continue
        seen.add(u)
        stack += [mgr.lo[u], mgr.hi[u]]
    order = sorted(seen, key=lambda u: (mgr.level[u], u))
    n = len(order)
    index = {u: i for i, u in enumerate(order)}
    index[_F], index[_T] = n, n + 1
    slot = np.array([mgr.level[u] for u in order], dtype=np.int64)
    lo = np.array([index[mgr.lo[u]] for u in order], dtype=np.int64)
    hi = np.array([index[mgr.hi[u]] for u in order], dtype=np.int64)
    return Xbdd(slot, lo, hi, index[root], tuple(slots))


def _symmetric_layered(mgr: _Manager, body: Symmetric, L: int) -> int:
    """Count-based construction; slot ``i`` is the i-th literal (polarity folded in)."""
    kind, k = body.kind, body.k

    def normal(state):
        # collapse states whose outcome is already decided
        if kind == "or" and state == 1:
            return "T"
        if kind == "card" and state > k:
            return "F"
        if kind == "nae" and state == (1, 1):
            return "T"
        return state

    def step(state, lit_true):
        if kind == "or":
            return 1 if lit_true else state
        if kind == "card":
            return state + lit_true
        if kind == "xor":
            return state ^ lit_true
        return (state[0] | lit_true, state[1] | (not lit_true))

    @lru_cache(maxsize=None)
    def node(i, state):
        state = normal(state)
        if state == "T":
            return _T
        if state == "F":
            return _F
        if i == L:
            if kind == "nae":
                return _F
            return _T if body.accepts(state, L) else _F
        return mgr.mk(i, node(i + 1, step(state, False)), node(i + 1, step(state, True)))

    start = (0, 0) if kind == "nae" else 0
    return node(0, start)


def _symmetric_by_apply(mgr: _Manager, body: Symmetric, level_of) -> int:
    """Generic count DP through apply; handles repeated variables."""
    L = len(body.literals)
    count = [_T] + [_F] * L  # count[c]: exactly c literals true so far
    for lit in body.literals:
        x = mgr.var(level_of[lit.var], lit.negated)
        nx = mgr.neg(x)
        new = []
        for c in range(L + 1):
            keep = mgr.apply("and", nx, count[c])
            inc = mgr.apply("and", x, count[c - 1]) if c > 0 else _F
            new.append(mgr.apply("or", keep, inc))
        count = new
    out = _F
    for c in range(L + 1):
        if body.accepts(c, L):
            out = mgr.apply("or", out, count[c])
    return out


def compile(c: Constraint, order=None, node_budget: int = DEFAULT_NODE_BUDGET) -> Xbdd:
    """Compile a constraint into an ordered reduced diagram.

    ``order`` optionally permutes the default slot order (a sequence of
    :class:`Slot` covering the same slots).
    """
    slots = constraint_slots(c)
    if order is not None:
        if sorted(order, key=repr) != sorted(slots, key=repr):
            raise ValueError("order must be a permutation of the constraint's slots")
        slots = tuple(order)
    mgr = _Manager(node_budget)
    body = c.body
    if isinstance(body, Symmetric) and len(slots) == len(body.literals) and \
            {(s.kind, s.index, s.negated) for s in slots} == {(l.kind, l.index, l.negated) for l in body.literals}:
        # one slot per literal, polarity folded into the slot
        return _extract(mgr, _symmetric_layered(mgr, body, len(slots)), slots)

    level_of = {(s.kind, s.index): i for i, s in enumerate(slots)}
    slot_neg = {(s.kind, s.index): s.negated for s in slots}

    def leaf(lit: Literal) -> int:
        return mgr.var(level_of[lit.var], lit.negated != slot_neg[lit.var])

    if isinstance(body, Symmetric):
        lits = tuple(Literal(l.kind, l.index, l.negated != slot_neg[l.var]) for l in body.literals)
        root = _symmetric_by_apply(mgr, Symmetric(body.kind, lits, body.k), level_of)
        return _extract(mgr, root, slots)

    def build(node) -> int:
        if isinstance(node, Literal):
            return leaf(node)
        if node.op == "not":
            return mgr.neg(build(node.args[0]))
        acc = build(node.args[0])
        for arg in node.args[1:]:
            acc = mgr.apply(node.op, acc, build(arg))
        return acc

    return _extract(mgr, build(body), slots)


# ---------------------------------------------------------------------------
# message passing


@dataclass
class Messages:
    m_td: np.ndarray
    p: np.ndarray
    m_bu: np.ndarray | None = None


def forward(d: Xbdd, p) -> tuple[Messages, float]:
    """Top-down pass; returns messages and the satisfaction probability."""
    p = np.asarray(p, dtype=float)
    if p.shape != (len(d.slots),):
        raise ValueError(f"expected {len(d.slots)} slot probabilities, got shape {p.shape}")
    m_td = np.zeros(d.n_nodes + 2)
    m_td[d.root] = 1.0
    slot, lo, hi = d.slot, d.lo, d.hi
    for v in range(d.n_nodes):
        pv = p[slot[v]]
        m_td[hi[v]] += pv * m_td[v]
        m_td[lo[v]] += (1.0 - pv) * m_td[v]
    return Messages(m_td, p.copy()), float(m_td[d.TRUE])


def backward(d: Xbdd, msgs: Messages, p) -> np.ndarray:
    """Bottom-up pass; returns d(sat_prob)/d(p[s]) for every slot."""
    p = np.asarray(p, dtype=float)
    if not np.array_equal(p, msgs.p):
        raise StaleMessages("messages were computed for different slot probabilities")
    m_bu = np.zeros(d.n_nodes + 2)
    m_bu[d.TRUE] = 1.0
    grad = np.zeros(len(d.slots))
    slot, lo, hi, m_td = d.slot, d.lo, d.hi, msgs.m_td
    for v in range(d.n_nodes - 1, -1, -1):
        pv = p[slot[v]]
        m_bu[v] = pv * m_bu[hi[v]] + (1.0 - pv) * m_bu[lo[v]]
        grad[slot[v]] += m_td[v] * (m_bu[hi[v]] - m_bu[lo[v]])
    msgs.m_bu = m_bu
    return grad


def symmetric_cop(kind: str, k: int | None, p) -> tuple[float, np.ndarray]:
    """Satisfaction probability of a symmetric constraint over independent literals.

    O(L^2) count DP; ``p[i]`` is the probability literal ``i`` is True.
    """
    p = np.asarray(p, dtype=float)
    L = len(p)
    counts = np.arange(L + 2)
    if kind == "or":
        acc = counts >= 1
    elif kind == "card":
        acc = counts <= k
    elif kind == "nae":
        acc = (counts > 0) & (counts < L)
    elif kind == "xor":
        acc = counts % 2 == 1
    else:
        raise ValueError(f"unknown symmetric kind {kind!r}")
    acc = acc.astype(float)
    acc[L + 1] = 0.0

    pre = np.zeros((L + 1, L + 2))
    pre[0, 0] = 1.0
    for i in range(L):
        pre[i + 1] = (1.0 - p[i]) * pre[i]
        pre[i + 1, 1:] += p[i] * pre[i, :-1]
    # value[i, c]: acceptance probability with c true among the first i literals
    value = np.zeros((L + 1, L + 2))
    value[L] = acc
    for i in range(L - 1, -1, -1):
        value[i, :-1] = p[i] * value[i + 1, 1:] + (1.0 - p[i]) * value[i + 1, :-1]
    grad = np.array([pre[i, :-1] @ (value[i + 1, 1:] - value[i + 1, :-1]) for i in range(L)])
    return float(value[0, 0]), grad


def to_dot(d: Xbdd, name: str = "xbdd") -> str:
    lines = [f"digraph {name} {{", '  F [shape=box,label="0"];', '  T [shape=box,label="1"];']

    def ref(v):
        return "F" if v == d.FALSE else "T" if v == d.TRUE else f"n{v}"

    for v in range(d.n_nodes):
        s = d.slots[d.slot[v]]
        label = ("~" if s.negated else "") + f"{'x' if s.kind == 'b' else 'a'}{s.index}"
        lines.append(f'  n{v} [label="{label}"];')
        lines.append(f"  n{v} -> {ref(d.lo[v])} [style=dashed];")
        lines.append(f"  n{v} -> {ref(d.hi[v])};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# batched propagation over many diagrams


@dataclass
class DiagramBatch:
    """Several diagrams fused into flat arrays and swept slot level by slot level.

    ``var`` maps each node to an index of the global relaxed vector ``v``
    (Booleans then atoms) and ``sign`` is -1 for negated slots, so the node's
    literal-true probability is ``(1 - sign * v[var]) / 2``.
    """

    var: np.ndarray
    sign: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    owner: np.ndarray  # constraint row of each node
    roots: np.ndarray
    true_ids: np.ndarray
    layers: list = field(default_factory=list)
    n_vars: int = 0

    @classmethod
    def build(cls, diagrams, var_index, n_vars: int) -> "DiagramBatch":
        """``var_index[r]`` maps diagram r's slot ids to global variable indices."""
        var, sign, lo, hi, owner, level = [], [], [], [], [], []
        roots, true_ids = [], []
        offset = 0
        # terminals are appended after all decision nodes
        n_dec = sum(d.n_nodes for d in diagrams)
        for r, (d, vmap) in enumerate(zip(diagrams, var_index)):
            f_id, t_id = n_dec + 2 * r, n_dec + 2 * r + 1

            def g(u, d=d, off=offset, f_id=f_id, t_id=t_id):
                return f_id if u == d.FALSE else t_id if u == d.TRUE else u + off

            for v in range(d.n_nodes):
                s = d.slot[v]
                var.append(vmap[s])
                sign.append(-1.0 if d.slots[s].negated else 1.0)
                lo.append(g(d.lo[v]))
                hi.append(g(d.hi[v]))
                owner.append(r)
                level.append(s)
            roots.append(g(d.root))
            true_ids.append(t_id)
            offset += d.n_nodes
        level = np.array(level, dtype=np.int64)
        layers = [np.flatnonzero(level == lv) for lv in np.unique(level)]
        as_i = lambda xs: np.array(xs, dtype=np.int64)
        return cls(as_i(var), np.array(sign, dtype=float), as_i(lo), as_i(hi), as_i(owner),
                   as_i(roots), as_i(true_ids), layers, n_vars)

    @property
    def n_total(self) -> int:
        return len(self.var) + 2 * len(self.roots)

    def node_probs(self, v: np.ndarray) -> np.ndarray:
        return (1.0 - self.sign * v[self.var]) / 2.0

    def forward(self, v: np.ndarray):
        p = self.node_probs(v)
        m_td = np.zeros(self.n_total)
        np.add.at(m_td, self.roots, 1.0)
        for idx in self.layers:
            mass = m_td[idx]
            pi = p[idx]
            np.add.at(m_td, self.hi[idx], pi * mass)
            np.add.at(m_td, self.lo[idx], (1.0 - pi) * mass)
        return m_td[self.true_ids], m_td, p

    def backward(self, m_td: np.ndarray, p: np.ndarray, row_weight: np.ndarray) -> np.ndarray:
        """Gradient of sum_r row_weight[r] * (1 - 2 sat_r) with respect to ``v``."""
        m_bu = np.zeros(self.n_total)
        m_bu[self.true_ids] = 1.0
        dsat = np.zeros(len(self.var))
        for idx in reversed(self.layers):
            pi = p[idx]
            up_hi = m_bu[self.hi[idx]]
            up_lo = m_bu[self.lo[idx]]
            m_bu[idx] = pi * up_hi + (1.0 - pi) * up_lo
            dsat[idx] = m_td[idx] * (up_hi - up_lo)
        # d(1 - 2 sat)/dv = -2 * dsat * dp/dv, and dp/dv = -sign / 2
        contrib = row_weight[self.owner] * self.sign * dsat
        return np.bincount(self.var, weights=contrib, minlength=self.n_vars)
