"""Problem instances: atoms, literals, constraints, formulas.

Holds the exact (unsmoothed) semantics, the HSMT text format and the
SMT-LIB2 exporter.  Truth values use the +/-1 encoding throughout the
package: ``TRUE == -1`` and ``FALSE == +1``.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

import numpy as np

TRUE = -1
FALSE = 1

SYMMETRIC_KINDS = ("or", "card", "nae", "xor")
EXPR_OPS = ("and", "or", "xor", "not")


class HsmtError(ValueError):
    """Malformed or unsupported instance text."""

    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}" + (f", col {col}" if col is not None else "") + ": "
        super().__init__(where + msg)


def truth(flag):
    """Map a Python/numpy bool (or array of them) to the +/-1 encoding."""
    return np.where(flag, TRUE, FALSE) if isinstance(flag, np.ndarray) else (TRUE if flag else FALSE)


def is_true(value) -> bool:
    return value == TRUE


# ---------------------------------------------------------------------------
# data model


@dataclass(frozen=True)
class Atom:
    """Canonical linear atom ``sum_j q_j y_j <= rhs`` (``<`` when strict)."""

    id: int
    coeffs: tuple[tuple[int, float], ...]
    rhs: float
    strict: bool = False

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError(f"atom {self.id}: empty coefficient list")
        js = [j for j, _ in self.coeffs]
        if len(set(js)) != len(js):
            raise ValueError(f"atom {self.id}: repeated variable")
        if any(q == 0 for _, q in self.coeffs):
            raise ValueError(f"atom {self.id}: zero coefficient")
        if list(js) != sorted(js):
            object.__setattr__(self, "coeffs", tuple(sorted(self.coeffs)))

    @classmethod
    def make(cls, id: int, coeffs, rel: str, rhs: float) -> "Atom":
        """Build from any relation in {<=, <, >=, >}; ``>``-type relations are negated."""
        if isinstance(coeffs, dict):
            coeffs = coeffs.items()
        coeffs = tuple(sorted((int(j), float(q)) for j, q in coeffs))
        if rel in ("<=", "<"):
            return cls(id, coeffs, float(rhs), rel == "<")
        if rel in (">=", ">"):
            return cls(id, tuple((j, -q) for j, q in coeffs), -float(rhs) + 0.0, rel == ">")
        if rel in ("=", "=="):
            raise ValueError("equality atoms unsupported")
        raise ValueError(f"unknown relation {rel!r}")

    @property
    def norm(self) -> float:
        return float(np.sqrt(sum(q * q for _, q in self.coeffs)))

    def lhs(self, y) -> float:
        s = 0.0
        for j, q in self.coeffs:
            s += q * y[j]
        return s

    def holds(self, y) -> bool:
        v = self.lhs(y)
        return v < self.rhs if self.strict else v <= self.rhs


@dataclass(frozen=True)
class Literal:
    kind: str  # "b" Boolean variable, "a" atom reference
    index: int
    negated: bool = False

    def __post_init__(self):
        if self.kind not in ("b", "a"):
            raise ValueError(f"bad literal kind {self.kind!r}")

    def __invert__(self) -> "Literal":
        return Literal(self.kind, self.index, not self.negated)

    @property
    def var(self) -> tuple[str, int]:
        return (self.kind, self.index)

    def token(self) -> str:
        return ("-" if self.negated else "+") + f"{self.kind}{self.index}"


def b(i: int) -> Literal:
    return Literal("b", i)


def a(i: int) -> Literal:
    return Literal("a", i)


@dataclass(frozen=True)
class Symmetric:
    kind: str
    literals: tuple[Literal, ...]
    k: int | None = None

    def __post_init__(self):
        if self.kind not in SYMMETRIC_KINDS:
            raise ValueError(f"unknown symmetric kind {self.kind!r}")
        if not self.literals:
            raise ValueError("symmetric constraint needs at least one literal")
        if self.kind == "card":
            if self.k is None or not 0 <= self.k <= len(self.literals):
                raise ValueError(f"card threshold {self.k} outside [0, {len(self.literals)}]")
        elif self.k is not None:
            raise ValueError(f"threshold only allowed for card, got {self.kind}")

    def accepts(self, count, length: int | None = None):
        """Satisfaction as a function of the number of true literals (works on arrays)."""
        L = len(self.literals) if length is None else length
        if self.kind == "or":
            return count >= 1
        if self.kind == "card":
            return count <= self.k
        if self.kind == "nae":
            return (count > 0) & (count < L)
        return count % 2 == 1


@dataclass(frozen=True)
class Op:
    op: str
    args: tuple

    def __post_init__(self):
        if self.op not in EXPR_OPS:
            raise ValueError(f"unknown operator {self.op!r}")
        if not self.args:
            raise ValueError(f"({self.op}) needs arguments")
        if self.op == "not" and len(self.args) != 1:
            raise ValueError("(not) takes exactly one argument")


Body = Union[Symmetric, Op, Literal]


def expr_literals(node) -> Iterable[Literal]:
    if isinstance(node, Literal):
        yield node
    else:
        for arg in node.args:
            yield from expr_literals(arg)


@dataclass(frozen=True)
class Constraint:
    body: Body
    weight: float = 1.0

    def __post_init__(self):
        if not self.weight > 0:
            raise ValueError(f"constraint weight must be positive, got {self.weight}")

    @property
    def literals(self) -> tuple[Literal, ...]:
        if isinstance(self.body, Symmetric):
            return self.body.literals
        return tuple(expr_literals(self.body))

    @property
    def is_symmetric(self) -> bool:
        return isinstance(self.body, Symmetric)

    @property
    def unit_atom(self) -> int | None:
        """Atom id if the constraint is a single positive atom, else None."""
        node = self.body
        if isinstance(node, Symmetric):
            if node.kind in ("or", "xor") and len(node.literals) == 1:
                node = node.literals[0]
            else:
                return None
        while isinstance(node, Op) and node.op in ("and", "or", "xor") and len(node.args) == 1:
            node = node.args[0]
        if isinstance(node, Literal) and node.kind == "a" and not node.negated:
            return node.index
        return None


@dataclass(frozen=True)
class Formula:
    n_bool: int
    n_real: int
    atoms: tuple[Atom, ...] = ()
    constraints: tuple[Constraint, ...] = ()
    names: tuple[tuple[str, str], ...] = ()
    meta: str = ""  # JSON blob for generator parameters; carried verbatim

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        for i, at in enumerate(self.atoms):
            if at.id != i:
                raise ValueError(f"atom ids must be dense, found {at.id} at position {i}")
            for j, _ in at.coeffs:
                if not 0 <= j < self.n_real:
                    raise ValueError(f"atom {i} references y{j}, only {self.n_real} reals")
        for ci, c in enumerate(self.constraints):
            for lit in c.literals:
                bound = self.n_bool if lit.kind == "b" else len(self.atoms)
                if not 0 <= lit.index < bound:
                    raise ValueError(f"constraint {ci}: literal {lit.token()} out of range")

    @property
    def k_total(self) -> int:
        return len(self.atoms)

    @property
    def total_weight(self) -> float:
        return float(sum(c.weight for c in self.constraints))

    @property
    def unit_atoms(self) -> list[Atom]:
        ids = sorted({c.unit_atom for c in self.constraints if c.unit_atom is not None})
        return [self.atoms[i] for i in ids]

    def meta_dict(self) -> dict:
        return json.loads(self.meta) if self.meta else {}


@dataclass
class Assignment:
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.int64).reshape(-1)
        self.y = np.asarray(self.y, dtype=float).reshape(-1)
        if np.any((self.x != TRUE) & (self.x != FALSE)):
            raise ValueError("Boolean values must be +1 or -1")

    def check_dims(self, f: Formula):
        if len(self.x) != f.n_bool or len(self.y) != f.n_real:
            raise ValueError(
                f"assignment has {len(self.x)} Booleans/{len(self.y)} reals, "
                f"formula needs {f.n_bool}/{f.n_real}"
            )


# ---------------------------------------------------------------------------
# slots: the distinct inputs a constraint reads


@dataclass(frozen=True)
class Slot:
    kind: str
    index: int
    negated: bool = False


def constraint_slots(c: Constraint) -> tuple[Slot, ...]:
    """Slots in default order: Booleans first, then atoms, ascending index.

    A symmetric body whose literals touch distinct variables gets one slot per
    literal carrying the literal's polarity.  Anything else gets one positive
    slot per distinct variable; polarity then lives in the body itself.
    """
    lits = c.literals
    order = {"b": 0, "a": 1}
    if isinstance(c.body, Symmetric) and len({l.var for l in lits}) == len(lits):
        return tuple(Slot(l.kind, l.index, l.negated)
                     for l in sorted(lits, key=lambda l: (order[l.kind], l.index)))
    vars_ = sorted({l.var for l in lits}, key=lambda v: (order[v[0]], v[1]))
    return tuple(Slot(k, i, False) for k, i in vars_)


def slot_function(c: Constraint, slots: Sequence[Slot] | None = None) -> Callable:
    """Return ``g(T) -> sat`` where ``T[..., s]`` is True iff slot ``s``'s literal holds.

    Works on boolean numpy arrays of shape (..., n_slots).
    """
    slots = constraint_slots(c) if slots is None else tuple(slots)
    body = c.body
    literal_slots = {(l.kind, l.index, l.negated) for l in getattr(body, "literals", ())}
    if isinstance(body, Symmetric) and len(slots) == len(body.literals) and \
            {(s.kind, s.index, s.negated) for s in slots} == literal_slots:
        L = len(slots)
        return lambda T: body.accepts(np.sum(T, axis=-1), L)

    col = {(s.kind, s.index): (i, s.negated) for i, s in enumerate(slots)}

    def lit_value(T, lit: Literal):
        i, neg = col[lit.var]
        return T[..., i] ^ (neg != lit.negated)

    if isinstance(body, Symmetric):
        L = len(body.literals)
        return lambda T: body.accepts(sum(lit_value(T, l).astype(np.int64) for l in body.literals), L)

    def ev(node, T):
        if isinstance(node, Literal):
            return lit_value(T, node)
        vals = [ev(arg, T) for arg in node.args]
        if node.op == "not":
            return ~vals[0]
        out = vals[0]
        for v in vals[1:]:
            out = (out & v) if node.op == "and" else (out | v) if node.op == "or" else (out ^ v)
        return out

    return lambda T: np.asarray(ev(body, T), dtype=bool)


# ---------------------------------------------------------------------------
# exact evaluation


def eval_atom(atom: Atom, y) -> int:
    """-1 if the atom holds at ``y`` (exact float evaluation), +1 otherwise."""
    return truth(atom.holds(y))


def _literal_truths(f_atoms: Sequence[Atom], lits_or_slots, x, y) -> np.ndarray:
    out = np.empty(len(lits_or_slots), dtype=bool)
    for i, s in enumerate(lits_or_slots):
        if s.kind == "b":
            val = x[s.index] == TRUE
        else:
            val = f_atoms[s.index].holds(y)
        out[i] = val != s.negated
    return out


def eval_constraint(c: Constraint, x, y, atoms: Sequence[Atom]) -> int:
    """-1 iff constraint ``c`` is satisfied by Booleans ``x`` (+/-1) and reals ``y``."""
    slots = constraint_slots(c)
    T = _literal_truths(atoms, slots, x, y)
    return truth(bool(slot_function(c, slots)(T)))


def eval_formula(f: Formula, asg: Assignment) -> tuple[float, list[bool]]:
    """Weighted exact objective and per-constraint satisfaction flags."""
    asg.check_dims(f)
    sat = [eval_constraint(c, asg.x, asg.y, f.atoms) == TRUE for c in f.constraints]
    obj = float(sum(c.weight * (TRUE if s else FALSE) for c, s in zip(f.constraints, sat)))
    return obj, sat


def is_model(f: Formula, asg: Assignment) -> bool:
    obj, sat = eval_formula(f, asg)
    return all(sat) and obj == -f.total_weight


def atom_truth_matrix(f: Formula, Y: np.ndarray) -> np.ndarray:
    """Exact atom truth for a batch of real points, shape (N, k_total)."""
    Y = np.atleast_2d(Y)
    out = np.empty((Y.shape[0], f.k_total), dtype=bool)
    for i, at in enumerate(f.atoms):
        lhs = np.zeros(Y.shape[0])
        for j, q in at.coeffs:
            lhs = lhs + q * Y[:, j]
        out[:, i] = lhs < at.rhs if at.strict else lhs <= at.rhs
    return out


def constraint_sat_batch(c: Constraint, Xtrue: np.ndarray, Atrue: np.ndarray) -> np.ndarray:
    """Vectorised satisfaction given Boolean truths (N, n_bool) and atom truths (N, k)."""
    slots = constraint_slots(c)
    cols = []
    for s in slots:
        src = Xtrue if s.kind == "b" else Atrue
        cols.append(src[:, s.index] ^ s.negated)
    T = np.stack(cols, axis=-1) if cols else np.zeros((Xtrue.shape[0], 0), dtype=bool)
    return slot_function(c, slots)(T)


# ---------------------------------------------------------------------------
# HSMT text format

_LIT_RE = re.compile(r"^([+-]?)([ba])(\d+)$")
_NUM = r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?(?:/\d+)?"


def _number(tok: str, line: int, col: int) -> float:
    if not re.fullmatch(_NUM, tok):
        raise HsmtError(f"expected a number, got {tok!r}", line, col)
    return float(Fraction(tok))


def _int(tok: str, line: int, col: int) -> int:
    if not re.fullmatch(r"\d+", tok):
        raise HsmtError(f"expected a non-negative integer, got {tok!r}", line, col)
    return int(tok)


def _tokens(line: str) -> list[tuple[str, int]]:
    return [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", line)]


def _literal(tok: str, line: int, col: int) -> Literal:
    m = _LIT_RE.match(tok)
    if not m:
        raise HsmtError(f"bad literal {tok!r}", line, col)
    return Literal(m.group(2), int(m.group(3)), m.group(1) == "-")


def _parse_sexpr(text: str, line: int, col0: int):
    toks = [(m.group(0), col0 + m.start()) for m in re.finditer(r"\(|\)|[^\s()]+", text)]
    pos = 0

    def node():
        nonlocal pos
        if pos >= len(toks):
            raise HsmtError("unexpected end of expression", line, col0 + len(text))
        tok, col = toks[pos]
        pos += 1
        if tok == "(":
            if pos >= len(toks):
                raise HsmtError("unexpected end of expression", line, col)
            op, ocol = toks[pos]
            pos += 1
            if op not in EXPR_OPS:
                raise HsmtError(f"unknown operator {op!r}", line, ocol)
            args = []
            while pos < len(toks) and toks[pos][0] != ")":
                args.append(node())
            if pos >= len(toks):
                raise HsmtError("missing ')'", line, col)
            pos += 1
            try:
                return Op(op, tuple(args))
            except ValueError as e:
                raise HsmtError(str(e), line, col) from None
        if tok == ")":
            raise HsmtError("unexpected ')'", line, col)
        m = re.fullmatch(r"([ba])(\d+)", tok)
        if not m:
            raise HsmtError(f"bad leaf {tok!r}", line, col)
        return Literal(m.group(1), int(m.group(2)))

    tree = node()
    if pos != len(toks):
        raise HsmtError("trailing tokens after expression", line, toks[pos][1])
    return tree


def parse_instance(text: str) -> Formula:
    header = None
    atoms: dict[int, tuple[Atom, int]] = {}
    constraints: list[tuple[Constraint, int]] = []
    meta = ""
    names: list[tuple[str, str]] = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped.startswith("#@meta "):
            meta = stripped[len("#@meta "):].strip()
            continue
        if stripped.startswith("#@name "):
            parts = stripped.split()
            if len(parts) == 3:
                names.append((parts[1], parts[2]))
            continue
        line = raw.split("#", 1)[0]
        toks = _tokens(line)
        if not toks:
            continue
        tag, tcol = toks[0]
        if header is None:
            if tag != "p" or len(toks) != 4 or toks[1][0] != "hsmt":
                raise HsmtError("expected header 'p hsmt <n_bool> <n_real>'", ln, tcol)
            header = (_int(toks[2][0], ln, toks[2][1]), _int(toks[3][0], ln, toks[3][1]))
            continue
        if tag == "p":
            raise HsmtError("duplicate header", ln, tcol)
        if tag == "a":
            if len(toks) < 5:
                raise HsmtError("atom line needs: a <id> <rel> <rhs> <j>:<coeff>...", ln, tcol)
            aid = _int(toks[1][0], ln, toks[1][1])
            rel, rcol = toks[2]
            if rel in ("=", "=="):
                raise HsmtError("equality atoms unsupported", ln, rcol)
            if rel not in ("<=", "<", ">=", ">"):
                raise HsmtError(f"unknown relation {rel!r}", ln, rcol)
            rhs = _number(toks[3][0], ln, toks[3][1])
            coeffs = {}
            for tok, col in toks[4:]:
                if ":" not in tok:
                    raise HsmtError(f"expected <j>:<coeff>, got {tok!r}", ln, col)
                js, qs = tok.split(":", 1)
                j = _int(js, ln, col)
                q = _number(qs, ln, col + len(js) + 1)
                if q == 0:
                    raise HsmtError("zero coefficient", ln, col)
                if j in coeffs:
                    raise HsmtError(f"variable y{j} repeated", ln, col)
                if j >= header[1]:
                    raise HsmtError(f"y{j} out of range (n_real={header[1]})", ln, col)
                coeffs[j] = q
            if aid in atoms:
                raise HsmtError(f"duplicate atom id {aid}", ln, toks[1][1])
            atoms[aid] = (Atom.make(aid, coeffs, rel, rhs), ln)
        elif tag == "c":
            if len(toks) < 3:
                raise HsmtError("constraint line needs: c <kind> [<k>] <weight> <lit>...", ln, tcol)
            kind, kcol = toks[1]
            if kind not in SYMMETRIC_KINDS:
                raise HsmtError(f"unknown constraint kind {kind!r}", ln, kcol)
            rest = toks[2:]
            k = None
            if kind == "card":
                if not rest:
                    raise HsmtError("card needs a threshold", ln, kcol)
                k = _int(rest[0][0], ln, rest[0][1])
                rest = rest[1:]
            if not rest:
                raise HsmtError("missing weight", ln, kcol)
            w = _number(rest[0][0], ln, rest[0][1])
            if w <= 0:
                raise HsmtError("weight must be positive", ln, rest[0][1])
            lits = tuple(_literal(t, ln, c) for t, c in rest[1:])
            try:
                constraints.append((Constraint(Symmetric(kind, lits, k), w), ln))
            except ValueError as e:
                raise HsmtError(str(e), ln, tcol) from None
        elif tag == "e":
            if len(toks) < 3:
                raise HsmtError("expression line needs: e <weight> <sexpr>", ln, tcol)
            w = _number(toks[1][0], ln, toks[1][1])
            if w <= 0:
                raise HsmtError("weight must be positive", ln, toks[1][1])
            start = toks[2][1] - 1
            tree = _parse_sexpr(line[start:], ln, start + 1)
            constraints.append((Constraint(tree, w), ln))
        else:
            raise HsmtError(f"unknown line tag {tag!r}", ln, tcol)
    if header is None:
        raise HsmtError("missing header 'p hsmt <n_bool> <n_real>'")
    n_bool, n_real = header
    ids = sorted(atoms)
    if ids != list(range(len(ids))):
        missing = next(i for i in range(len(ids) + 1) if i not in atoms)
        raise HsmtError(f"atom ids must be dense 0..k-1; missing a{missing}")
    k_total = len(ids)
    for c, ln in constraints:
        for lit in c.literals:
            bound = n_bool if lit.kind == "b" else k_total
            if lit.index >= bound:
                raise HsmtError(f"literal {lit.kind}{lit.index} out of range", ln)
    return Formula(n_bool, n_real, tuple(atoms[i][0] for i in ids),
                   tuple(c for c, _ in constraints), tuple(names), meta)


def _fmt(v: float) -> str:
    if float(v).is_integer() and abs(v) < 2**53:
        return str(int(v))
    return repr(float(v))


def _sexpr(node) -> str:
    if isinstance(node, Literal):
        leaf = f"{node.kind}{node.index}"
        return f"(not {leaf})" if node.negated else leaf
    return "(" + node.op + " " + " ".join(_sexpr(x) for x in node.args) + ")"


def serialize_instance(f: Formula) -> str:
    out = [f"p hsmt {f.n_bool} {f.n_real}"]
    if f.meta:
        out.append("#@meta " + f.meta)
    for k, v in f.names:
        out.append(f"#@name {k} {v}")
    for at in f.atoms:
        rel = "<" if at.strict else "<="
        terms = " ".join(f"{j}:{_fmt(q)}" for j, q in at.coeffs)
        out.append(f"a {at.id} {rel} {_fmt(at.rhs)} {terms}")
    for c in f.constraints:
        body = c.body
        if isinstance(body, Symmetric):
            k = f" {body.k}" if body.kind == "card" else ""
            lits = " ".join(l.token() for l in body.literals)
            out.append(f"c {body.kind}{k} {_fmt(c.weight)} {lits}")
        else:
            out.append(f"e {_fmt(c.weight)} {_sexpr(body)}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# SMT-LIB2


def _smt_num(v: float) -> str:
    fr = Fraction(v)
    mag = abs(fr)
    s = str(mag.numerator) if mag.denominator == 1 else f"(/ {mag.numerator} {mag.denominator})"
    return f"(- {s})" if fr < 0 else s


def _smt_atom(at: Atom) -> str:
    terms = []
    for j, q in at.coeffs:
        if q == 1:
            terms.append(f"y{j}")
        elif q == -1:
            terms.append(f"(- y{j})")
        else:
            terms.append(f"(* {_smt_num(q)} y{j})")
    lhs = terms[0] if len(terms) == 1 else "(+ " + " ".join(terms) + ")"
    return f"({'<' if at.strict else '<='} {lhs} {_smt_num(at.rhs)})"


def _smt_lit(lit: Literal, atoms: Sequence[Atom]) -> str:
    base = f"b{lit.index}" if lit.kind == "b" else _smt_atom(atoms[lit.index])
    return f"(not {base})" if lit.negated else base


def _smt_body(c: Constraint, atoms: Sequence[Atom]) -> str:
    body = c.body
    if isinstance(body, Literal):
        return _smt_lit(body, atoms)
    if isinstance(body, Op):
        args = [_smt_body(Constraint(x), atoms) for x in body.args]
        if len(args) == 1 and body.op != "not":
            return args[0]
        return f"({body.op} " + " ".join(args) + ")"
    lits = [_smt_lit(l, atoms) for l in body.literals]
    if body.kind in ("or", "xor"):
        return lits[0] if len(lits) == 1 else f"({body.kind} " + " ".join(lits) + ")"
    if body.kind == "nae":
        if len(lits) == 1:
            return "false"
        pos = "(or " + " ".join(lits) + ")"
        neg = "(or " + " ".join(f"(not {l})" for l in lits) + ")"
        return f"(and {pos} {neg})"
    terms = " ".join(f"(ite {l} 1 0)" for l in lits)
    total = f"(+ {terms})" if len(lits) > 1 else terms
    return f"(<= {total} {body.k})"


def export_smt2(f: Formula) -> str:
    out = ["(set-logic QF_LRA)"]
    out += [f"(declare-fun b{i} () Bool)" for i in range(f.n_bool)]
    out += [f"(declare-fun y{j} () Real)" for j in range(f.n_real)]
    for c in f.constraints:
        out.append(f"(assert {_smt_body(c, f.atoms)})")
    out += ["(check-sat)", "(exit)"]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# assignment text (s/v lines)


def format_assignment(asg: Assignment, per_line: int = 10) -> list[str]:
    toks = [f"x{i}={int(v)}" for i, v in enumerate(asg.x)]
    toks += [f"y{j}={repr(float(v))}" for j, v in enumerate(asg.y)]
    return ["v " + " ".join(toks[i:i + per_line]) for i in range(0, len(toks), per_line)]


def parse_assignment(text: str, n_bool: int | None = None, n_real: int | None = None) -> Assignment:
    xs: dict[int, int] = {}
    ys: dict[int, float] = {}
    for line in text.splitlines():
        parts = line.split()
        if not parts or parts[0] != "v":
            continue
        for tok in parts[1:]:
            m = re.fullmatch(r"([xy])(\d+)=(\S+)", tok)
            if not m:
                raise ValueError(f"bad assignment token {tok!r}")
            idx = int(m.group(2))
            if m.group(1) == "x":
                xs[idx] = int(m.group(3))
            else:
                ys[idx] = float(m.group(3))
    nb = (max(xs) + 1 if xs else 0) if n_bool is None else n_bool
    nr = (max(ys) + 1 if ys else 0) if n_real is None else n_real
    if set(xs) != set(range(nb)) or set(ys) != set(range(nr)):
        raise ValueError("assignment does not cover the expected variables")
    return Assignment([xs[i] for i in range(nb)], [ys[j] for j in range(nr)])
