"""First-order logic over (N, <): syntax, the standard translation from
hybrid formulas, and a decision procedure by quantifier elimination.

Terms are variable names (``str``) or numerals (``int``).  Quantifier-free
parts are kept in disjunctive normal form whose conjuncts are systems of
difference bounds ``u - v <= c``; a variable is eliminated from a closed
system by deleting its row and column.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from typing import Mapping, Optional, Union

from . import formula as hl
from .formula import analyze, rename_apart

__all__ = [
    "FolFormula", "Less", "Eq", "Pred", "FolTrue", "FolFalse", "FolNot", "FolAnd",
    "FolOr", "Exists", "Forall", "TRUE", "FALSE", "Term",
    "FolParseError", "ResourceLimit", "DifferenceSystem",
    "parse_fol", "fol_to_text", "fol_free_vars", "substitute",
    "translate_H", "close_sentence", "sentence_parts", "qe_decide", "eval_bounded", "eval_graded",
    "decide_at", "quantifier_count", "max_numeral", "bounded_oracle_bound",
    "fol_and", "fol_or",
]

Term = Union[str, int]


class FolFormula:
    __slots__ = ()

    def __str__(self):
        return fol_to_text(self)


@dataclass(frozen=True)
class Less(FolFormula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Eq(FolFormula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Pred(FolFormula):
    """Unary predicate atom; only used as input to the FOL(<,P) encoder."""
    name: str
    arg: Term


@dataclass(frozen=True)
class FolTrue(FolFormula):
    pass


@dataclass(frozen=True)
class FolFalse(FolFormula):
    pass


TRUE = FolTrue()
FALSE = FolFalse()


@dataclass(frozen=True)
class FolNot(FolFormula):
    body: FolFormula


@dataclass(frozen=True)
class FolAnd(FolFormula):
    left: FolFormula
    right: FolFormula


@dataclass(frozen=True)
class FolOr(FolFormula):
    left: FolFormula
    right: FolFormula


@dataclass(frozen=True)
class Exists(FolFormula):
    var: str
    body: FolFormula


@dataclass(frozen=True)
class Forall(FolFormula):
    var: str
    body: FolFormula


def fol_and(*parts: FolFormula) -> FolFormula:
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = FolAnd(out, p)
    return out


def fol_or(*parts: FolFormula) -> FolFormula:
    if not parts:
        return FALSE
    out = parts[0]
    for p in parts[1:]:
        out = FolOr(out, p)
    return out


# ---------------------------------------------------------------------------
# text syntax

class FolParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset


_FTOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>[<=&|!().])|(?P<bad>\S))")
_QUANT = {"exists", "forall"}
_RESERVED = _QUANT | {"true", "false"}


class _FolParser:
    def __init__(self, text):
        self.text = text
        self.toks = []
        pos = 0
        while pos < len(text):
            m = _FTOKEN.match(text, pos)
            if m is None or m.lastgroup is None:
                break
            kind = m.lastgroup
            if kind == "bad":
                raise FolParseError(f"unexpected character {m.group(kind)!r}", self._byte(m.start(kind)))
            self.toks.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.i = 0

    def _byte(self, idx):
        return len(self.text[:idx].encode("utf-8"))

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def error(self, msg):
        tok = self.peek()
        raise FolParseError(msg, self._byte(tok[2] if tok else len(self.text)))

    def take(self, value=None):
        tok = self.peek()
        if tok is None or (value is not None and tok[1] != value):
            self.error(f"expected {value!r}" if value else "unexpected end of input")
        self.i += 1
        return tok

    def formula(self):
        left = self.conj()
        while self.peek() and self.peek()[1] == "|":
            self.take()
            left = FolOr(left, self.conj())
        return left

    def conj(self):
        left = self.unary()
        while self.peek() and self.peek()[1] == "&":
            self.take()
            left = FolAnd(left, self.unary())
        return left

    def unary(self):
        tok = self.peek()
        if tok is None:
            self.error("unexpected end of input")
        kind, value, _ = tok
        if value == "!":
            self.take()
            return FolNot(self.unary())
        if value == "(":
            self.take()
            inner = self.formula()
            self.take(")")
            return inner
        if kind == "name" and value in _QUANT:
            self.take()
            var = self.take()
            if var[0] != "name" or var[1] in _RESERVED:
                self.i -= 1
                self.error("expected a variable name")
            self.take(".")
            body = self.formula()  # quantifier scope extends to the right
            return Exists(var[1], body) if value == "exists" else Forall(var[1], body)
        if value == "true":
            self.take()
            return TRUE
        if value == "false":
            self.take()
            return FALSE
        if kind == "name" and self.i + 1 < len(self.toks) and self.toks[self.i + 1][1] == "(":
            self.take()
            self.take("(")
            arg = self.term()
            self.take(")")
            return Pred(value, arg)
        left = self.term()
        op = self.take()
        if op[1] not in ("<", "="):
            self.i -= 1
            self.error("expected '<' or '='")
        right = self.term()
        return Less(left, right) if op[1] == "<" else Eq(left, right)

    def term(self):
        tok = self.take()
        if tok[0] == "num":
            return int(tok[1])
        if tok[0] == "name" and tok[1] not in _RESERVED:
            return tok[1]
        self.i -= 1
        self.error("expected a variable or numeral")


def parse_fol(text: str) -> FolFormula:
    p = _FolParser(text)
    if not p.toks:
        raise FolParseError("empty formula", 0)
    f = p.formula()
    if p.peek() is not None:
        p.error(f"unexpected trailing {p.peek()[1]!r}")
    return f


def fol_to_text(f: FolFormula) -> str:
    def go(node, nested):
        t = type(node)
        if t is Less:
            return f"{node.left} < {node.right}"
        if t is Eq:
            return f"{node.left} = {node.right}"
        if t is Pred:
            return f"{node.name}({node.arg})"
        if t is FolTrue:
            return "true"
        if t is FolFalse:
            return "false"
        if t is FolNot:
            return "!" + go(node.body, True)
        if t in (FolAnd, FolOr):
            sep = " & " if t is FolAnd else " | "
            return "(" + go(node.left, True) + sep + go(node.right, True) + ")"
        if t in (Exists, Forall):
            q = "exists" if t is Exists else "forall"
            s = f"{q} {node.var}. {go(node.body, False)}"
            return f"({s})" if nested else s
        raise TypeError(f"not a FOL formula: {node!r}")

    return go(f, False)


def fol_free_vars(f: FolFormula) -> set[str]:
    out: set[str] = set()

    def go(node, bound):
        t = type(node)
        if t in (Less, Eq):
            for term in (node.left, node.right):
                if isinstance(term, str) and term not in bound:
                    out.add(term)
        elif t is Pred:
            if isinstance(node.arg, str) and node.arg not in bound:
                out.add(node.arg)
        elif t is FolNot:
            go(node.body, bound)
        elif t in (FolAnd, FolOr):
            go(node.left, bound)
            go(node.right, bound)
        elif t in (Exists, Forall):
            go(node.body, bound | {node.var})

    go(f, frozenset())
    return out


def substitute(f: FolFormula, values: Mapping[str, Term]) -> FolFormula:
    """Replace free occurrences of variables by terms (no capture check:
    intended for numerals)."""
    def go(node, vals):
        t = type(node)
        if t is Less:
            return Less(term_in(node.left, vals), term_in(node.right, vals))
        if t is Eq:
            return Eq(term_in(node.left, vals), term_in(node.right, vals))
        if t is Pred:
            return Pred(node.name, term_in(node.arg, vals))
        if t is FolNot:
            return FolNot(go(node.body, vals))
        if t in (FolAnd, FolOr):
            return t(go(node.left, vals), go(node.right, vals))
        if t in (Exists, Forall):
            inner = {k: v for k, v in vals.items() if k != node.var}
            return t(node.var, go(node.body, inner))
        return node

    def term_in(tm, vals):
        return vals.get(tm, tm) if isinstance(tm, str) else tm

    return go(f, dict(values))


def quantifier_count(f: FolFormula) -> int:
    t = type(f)
    if t in (Exists, Forall):
        return 1 + quantifier_count(f.body)
    if t is FolNot:
        return quantifier_count(f.body)
    if t in (FolAnd, FolOr):
        return quantifier_count(f.left) + quantifier_count(f.right)
    return 0


def max_numeral(f: FolFormula) -> int:
    t = type(f)
    if t in (Less, Eq):
        return max([x for x in (f.left, f.right) if isinstance(x, int)], default=0)
    if t is FolNot or t in (Exists, Forall):
        return max_numeral(f.body)
    if t in (FolAnd, FolOr):
        return max(max_numeral(f.left), max_numeral(f.right))
    return 0


def _quantifier_depth(f: FolFormula) -> int:
    t = type(f)
    if t in (Exists, Forall):
        return 1 + _quantifier_depth(f.body)
    if t is FolNot:
        return _quantifier_depth(f.body)
    if t in (FolAnd, FolOr):
        return max(_quantifier_depth(f.left), _quantifier_depth(f.right))
    return 0


# ---------------------------------------------------------------------------
# standard translation

def _fresh_names(taken: set[str], base: str = "t"):
    k = 0
    while True:
        name = base if k == 0 else f"{base}{k}"
        k += 1
        if name not in taken:
            taken.add(name)
            yield name


def _hl_names(f: hl.Formula) -> set[str]:
    names = set()
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, (hl.Nominal, hl.SVar, hl.Prop)):
            names.add(node.name)
        elif isinstance(node, hl.Down):
            names.add(node.var)
        elif isinstance(node, hl.At):
            names.add(node.target.name)
        stack.extend(node.children())
    return names


def _nominal_names(f: hl.Formula, taken: set[str]) -> dict[str, str]:
    """FOL variable for each nominal; renamed when a state variable has the
    same name."""
    svar_names = set()
    noms = set()
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, hl.SVar):
            svar_names.add(node.name)
        elif isinstance(node, hl.Down):
            svar_names.add(node.var)
        elif isinstance(node, hl.At):
            (svar_names if isinstance(node.target, hl.SVar) else noms).add(node.target.name)
        elif isinstance(node, hl.Nominal):
            noms.add(node.name)
        stack.extend(node.children())
    out = {}
    for name in sorted(noms):
        if name in svar_names:
            out[name] = next(_fresh_names(taken, "n_" + name))
        else:
            out[name] = name
    return out


def _translate(f: hl.Formula, z: Term, fresh, noms: Mapping[str, str]) -> FolFormula:
    def name(t):
        return noms[t.name] if isinstance(t, hl.Nominal) else t.name

    def go(node, z):
        t = type(node)
        if t is hl.SVar or t is hl.Nominal:
            return Eq(name(node), z)
        if t is hl.Prop or t is hl.Top:
            return TRUE
        if t is hl.Bottom:
            return FALSE
        if t is hl.And:
            return FolAnd(go(node.left, z), go(node.right, z))
        if t is hl.Or:
            return FolOr(go(node.left, z), go(node.right, z))
        if t is hl.Diamond:
            v = next(fresh)
            return Exists(v, FolAnd(Less(z, v), go(node.body, v)))
        if t is hl.Box:
            v = next(fresh)
            return Forall(v, FolOr(FolOr(Less(v, z), Eq(v, z)), go(node.body, v)))
        if t is hl.Down:
            return Exists(node.var, FolAnd(Eq(node.var, z), go(node.body, z)))
        if t is hl.At:
            return go(node.body, name(node.target))
        if t is hl.Neg:
            raise ValueError("standard translation is defined for negation-free formulas")
        raise TypeError(f"not a formula: {node!r}")

    return go(f, z)


def translate_H(f: hl.Formula, z: Term = "z") -> FolFormula:
    """Standard translation of a monotone hybrid formula at point ``z``.

    Bound variables are renamed apart first; each modal operator introduces
    a fresh variable ``t``, ``t1``, ``t2``, ...
    """
    f = rename_apart(f)
    taken = _hl_names(f)
    if isinstance(z, str):
        if z in taken:
            raise ValueError(f"evaluation variable {z!r} clashes with a name in the formula")
        taken.add(z)
    noms = _nominal_names(f, taken)
    return _translate(f, z, _fresh_names(taken), noms)


def sentence_parts(f: hl.Formula) -> tuple[FolFormula, list[str], dict[str, str]]:
    """``H(f | <>f, 0)``, the sorted variables to close it with, and the FOL
    variable chosen for each nominal."""
    f = rename_apart(f)
    taken = _hl_names(f)
    noms = _nominal_names(f, taken)
    body = _translate(hl.Or(f, hl.Diamond(f)), 0, _fresh_names(taken), noms)
    closing = sorted(set(analyze(f).free_svars) | set(noms.values()))
    return body, closing, noms


def close_sentence(f: hl.Formula) -> FolFormula:
    """The sentence ``exists free. H(f | <>f, 0)``, true over (N,<) iff ``f``
    is satisfiable there.  Nominals are closed like free state variables."""
    body, closing, _ = sentence_parts(f)
    for v in reversed(closing):
        body = Exists(v, body)
    return body


# ---------------------------------------------------------------------------
# difference bounds

ZERO = ""  # the distinguished zero variable


class ResourceLimit(RuntimeError):
    """Quantifier elimination exceeded its clause ceiling."""


def _limit_from_env() -> int:
    raw = os.environ.get("HYLOSAT_QE_LIMIT")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return 1_000_000


INF = float("inf")


def _close(atoms) -> Optional[tuple[list[str], dict]]:
    """Shortest-path closure including ``v >= 0``; ``None`` if infeasible."""
    names = {ZERO}
    for u, v, _ in atoms:
        names.add(u)
        names.add(v)
    vs = sorted(names)
    d = {(u, v): (0 if u == v else INF) for u in vs for v in vs}
    for v in vs:
        if v != ZERO:
            d[(ZERO, v)] = 0
    for u, v, c in atoms:
        if c < d[(u, v)]:
            d[(u, v)] = c
    for k in vs:
        for i in vs:
            dik = d[(i, k)]
            if dik == INF:
                continue
            for j in vs:
                alt = dik + d[(k, j)]
                if alt < d[(i, j)]:
                    d[(i, j)] = alt
    for v in vs:
        if d[(v, v)] < 0:
            return None
    return vs, d


def _minimal(vs: list[str], d: dict) -> frozenset:
    """Canonical irredundant constraint set of a closed system."""
    # zero-cycle equivalence classes; Z first so it represents its class
    rep: dict[str, str] = {}
    classes: dict[str, list[str]] = {}
    for v in vs:
        for r in classes:
            if d[(r, v)] + d[(v, r)] == 0:
                rep[v] = r
                classes[r].append(v)
                break
        else:
            rep[v] = v
            classes[v] = [v]
    out = set()
    for r, members in classes.items():
        if len(members) > 1:
            ring = members + [members[0]]
            for a, b in zip(ring, ring[1:]):
                out.add((a, b, d[(a, b)]))
    reps = list(classes)
    for i in reps:
        for j in reps:
            if i == j or d[(i, j)] == INF:
                continue
            c = d[(i, j)]
            if any(k != i and k != j and d[(i, k)] + d[(k, j)] <= c for k in reps):
                continue
            out.add((i, j, c))
    # v >= 0 (and anything weaker) is implicit
    return frozenset(a for a in out if not (a[0] == ZERO and a[2] >= 0))


_CANON: dict = {}


def _canonical(atoms: frozenset) -> Optional[frozenset]:
    hit = _CANON.get(atoms, 0)
    if hit != 0:
        return hit
    closed = _close(atoms)
    res = None if closed is None else _minimal(*closed)
    if len(_CANON) > 200_000:
        _CANON.clear()
    _CANON[atoms] = res
    return res


def _project(atoms: frozenset, var: str) -> Optional[frozenset]:
    closed = _close(atoms)
    if closed is None:
        return None
    vs, d = closed
    if var in vs:
        vs = [v for v in vs if v != var]
        d = {k: c for k, c in d.items() if var not in k}
    return _minimal(vs, d)


class DifferenceSystem:
    """A conjunction of bounds ``u - v <= c`` over naturals.

    The zero variable ``""`` stands for the constant 0, so ``("x", "", 3)``
    reads ``x <= 3`` and ``("", "x", -2)`` reads ``x >= 2``.
    """

    __slots__ = ("atoms", "variables")

    def __init__(self, atoms=(), variables=()):
        self.atoms = frozenset((u, v, int(c)) for u, v, c in atoms)
        names = set(variables)
        for u, v, _ in self.atoms:
            names.update((u, v))
        names.discard(ZERO)
        self.variables = frozenset(names)

    def __repr__(self):
        return f"DifferenceSystem({sorted(self.atoms)!r})"

    def closure(self) -> Optional[dict]:
        closed = _close(self.atoms | {(v, v, 0) for v in self.variables})
        return None if closed is None else closed[1]

    def feasible(self) -> bool:
        return self.closure() is not None

    def project(self, var: str) -> "DifferenceSystem":
        """Exact existential elimination of ``var``; an infeasible system
        projects to one containing ``0 - 0 <= -1``."""
        res = _project(self.atoms | {(v, v, 0) for v in self.variables}, var)
        rest = self.variables - {var}
        if res is None:
            return DifferenceSystem([(ZERO, ZERO, -1)], rest)
        return DifferenceSystem(res, rest)

    def holds(self, values: Mapping[str, int]) -> bool:
        val = dict(values)
        val[ZERO] = 0
        if any(val[v] < 0 for v in self.variables):
            return False
        return all(val[u] - val[v] <= c for u, v, c in self.atoms)


# ---------------------------------------------------------------------------
# quantifier elimination

def _term(t: Term) -> tuple[str, int]:
    return (ZERO, t) if isinstance(t, int) else (t, 0)


def _leq(a: Term, b: Term, c: int):
    """Atoms (or a constant) for ``a - b <= c``."""
    (u, x), (v, y) = _term(a), _term(b)
    bound = c - x + y
    if u == v:
        return 0 <= bound
    return (u, v, bound)


_TRUE_DNF = frozenset([frozenset()])
_FALSE_DNF: frozenset = frozenset()


class _Qe:
    def __init__(self, limit: int):
        self.limit = limit

    def check(self, n):
        if n > self.limit:
            raise ResourceLimit(f"quantifier elimination exceeded {self.limit} clauses")

    def atom(self, a):
        if a is True:
            return _TRUE_DNF
        if a is False:
            return _FALSE_DNF
        c = _canonical(frozenset([a]))
        return _FALSE_DNF if c is None else frozenset([c])

    def literal(self, node, pos):
        t = type(node)
        if t is Less:
            if pos:
                return self.atom(_leq(node.left, node.right, -1))
            return self.atom(_leq(node.right, node.left, 0))
        if pos:
            return self.conj(self.atom(_leq(node.left, node.right, 0)),
                             self.atom(_leq(node.right, node.left, 0)))
        return self.disj(self.atom(_leq(node.left, node.right, -1)),
                         self.atom(_leq(node.right, node.left, -1)))

    def disj(self, a, b):
        if a == _TRUE_DNF or b == _TRUE_DNF:
            return _TRUE_DNF
        return self.prune(a | b)

    def conj(self, a, b):
        if not a or not b:
            return _FALSE_DNF
        self.check(len(a) * len(b))
        out = set()
        for x in a:
            for y in b:
                c = _canonical(x | y) if x and y else (x or y)
                if c is not None:
                    out.add(c)
        return self.prune(frozenset(out))

    def prune(self, dnf):
        if frozenset() in dnf:
            return _TRUE_DNF
        self.check(len(dnf))
        if len(dnf) < 2 or len(dnf) > 400:
            return frozenset(dnf)
        closures = {}
        for c in dnf:
            closures[c] = _close(c)[1]
        keep = []
        ordered = sorted(dnf, key=len)
        for c in ordered:
            dc = closures[c]
            # c is redundant if some kept clause k is implied by c
            if any(all(dc.get((u, v), INF) <= w for u, v, w in k) for k in keep):
                continue
            keep = [k for k in keep if not all(closures[k].get((u, v), INF) <= w for u, v, w in c)]
            keep.append(c)
        return frozenset(keep)

    def negate(self, dnf):
        out = _TRUE_DNF
        for clause in dnf:
            alt = _FALSE_DNF
            for u, v, c in clause:
                alt = self.disj(alt, self.atom((v, u, -c - 1)))
            out = self.conj(out, alt)
            if not out:
                break
        return out

    def project(self, dnf, var):
        out = set()
        for clause in dnf:
            r = _project(clause, var)
            if r is not None:
                if not r:
                    return _TRUE_DNF
                out.add(r)
        return self.prune(frozenset(out))

    def run(self, node, pos):
        t = type(node)
        if t is FolTrue:
            return _TRUE_DNF if pos else _FALSE_DNF
        if t is FolFalse:
            return _FALSE_DNF if pos else _TRUE_DNF
        if t in (Less, Eq):
            return self.literal(node, pos)
        if t is FolNot:
            return self.run(node.body, not pos)
        if t is FolAnd or t is FolOr:
            a = self.run(node.left, pos)
            # short-circuit on absorbing values
            if (t is FolAnd) == pos:
                if not a:
                    return a
                return self.conj(a, self.run(node.right, pos))
            if a == _TRUE_DNF:
                return a
            return self.disj(a, self.run(node.right, pos))
        if t is Exists or t is Forall:
            # exists under positive polarity and forall under negative both
            # amount to projecting from the body at the same polarity
            if (t is Exists) == pos:
                return self.project(self.run(node.body, pos), node.var)
            inner = self.project(self.run(node.body, not pos), node.var)
            return self.negate(inner)
        if t is Pred:
            raise ValueError("quantifier elimination does not support predicate atoms")
        raise TypeError(f"not a FOL formula: {node!r}")


def _one_point(f: FolFormula) -> FolFormula:
    """Rewrite ``exists x. (x = t & B)`` to ``B[x := t]`` when ``t`` is a
    numeral or a variable other than ``x``."""
    t = type(f)
    if t is FolNot:
        return FolNot(_one_point(f.body))
    if t in (FolAnd, FolOr):
        return t(_one_point(f.left), _one_point(f.right))
    if t is Forall:
        return Forall(f.var, _one_point(f.body))
    if t is Exists:
        body = _one_point(f.body)
        if isinstance(body, FolAnd) and isinstance(body.left, Eq):
            eq = body.left
            other = eq.right if eq.left == f.var else eq.left if eq.right == f.var else None
            if other is not None and other != f.var and _safe_subst(body.right, f.var, other):
                return substitute(body.right, {f.var: other})
        return Exists(f.var, body)
    return f


def _safe_subst(f: FolFormula, var: str, term: Term) -> bool:
    """No binder in ``f`` captures ``term`` at a free occurrence of ``var``."""
    if isinstance(term, int):
        return True

    def go(node, under):
        t = type(node)
        if t in (Less, Eq):
            return not (under and var in (node.left, node.right))
        if t is FolNot:
            return go(node.body, under)
        if t in (FolAnd, FolOr):
            return go(node.left, under) and go(node.right, under)
        if t in (Exists, Forall):
            if node.var == var:
                return True
            return go(node.body, under or node.var == term)
        return True

    return go(f, False)


def qe_decide(s: FolFormula, limit: Optional[int] = None) -> bool:
    """Truth of the closed sentence ``s`` over (N, <).

    Raises :class:`ResourceLimit` when an intermediate normal form exceeds
    ``limit`` clauses (default: ``HYLOSAT_QE_LIMIT`` or one million).
    """
    free = fol_free_vars(s)
    if free:
        raise ValueError(f"sentence has free variables: {sorted(free)}")
    qe = _Qe(limit if limit is not None else _limit_from_env())
    return bool(qe.run(_one_point(s), True))


# ---------------------------------------------------------------------------
# bounded evaluation

def _eval(f: FolFormula, env: dict, bound) -> bool:
    t = type(f)
    if t is FolTrue:
        return True
    if t is FolFalse:
        return False
    if t is Less or t is Eq:
        a = env[f.left] if isinstance(f.left, str) else f.left
        b = env[f.right] if isinstance(f.right, str) else f.right
        return a < b if t is Less else a == b
    if t is FolNot:
        return not _eval(f.body, env, bound)
    if t is FolAnd:
        return _eval(f.left, env, bound) and _eval(f.right, env, bound)
    if t is FolOr:
        return _eval(f.left, env, bound) or _eval(f.right, env, bound)
    if t is Exists or t is Forall:
        old = env.get(f.var)
        want = t is Exists
        result = not want
        for val in range(bound(f, env) + 1):
            env[f.var] = val
            if _eval(f.body, env, bound) == want:
                result = want
                break
        if old is None:
            env.pop(f.var, None)
        else:
            env[f.var] = old
        return result
    if t is Pred:
        raise ValueError("bounded evaluation does not interpret predicate atoms")
    raise TypeError(f"not a FOL formula: {f!r}")


def eval_bounded(s: FolFormula, B: int) -> bool:
    """Truth of ``s`` with every quantifier ranging over ``{0, ..., B}``."""
    return _eval(s, {}, lambda node, env: B)


def bounded_oracle_bound(s: FolFormula) -> int:
    """``max numeral + quantifier count + 2``."""
    return max_numeral(s) + quantifier_count(s) + 2


def eval_graded(s: FolFormula) -> bool:
    """Exact truth over (N, <) by bounded evaluation with a scope-dependent
    bound: a quantifier with ``r`` quantifiers nested below and including
    it ranges up to ``m + 2**r``, ``m`` being the largest numeral or value
    currently in scope.  Beyond that point every candidate is equivalent for
    the remaining quantifier rank."""
    base = max_numeral(s)

    def bound(node, env):
        top = max([base, *env.values()])
        return top + 2 ** _quantifier_depth(node)

    return _eval(s, {}, bound)


# ---------------------------------------------------------------------------

def decide_at(f: hl.Formula, g: Mapping[str, int], n: int,
              valuation: Optional[Mapping[str, int]] = None,
              limit: Optional[int] = None) -> bool:
    """Whether ``g, n |= f`` over (N, <), by quantifier elimination."""
    f = rename_apart(f)
    taken = _hl_names(f)
    noms = _nominal_names(f, taken)
    valuation = dict(valuation or {})
    values: dict[str, int] = {}
    for v in analyze(f).free_svars:
        if v not in g:
            raise KeyError(f"no value for free state variable {v!r}")
        values[v] = g[v]
    for name, var in noms.items():
        if name not in valuation:
            raise KeyError(f"no value for nominal {name!r}")
        values[var] = valuation[name]
    body = _translate(f, n, _fresh_names(taken), noms)
    return qe_decide(substitute(body, values), limit)
