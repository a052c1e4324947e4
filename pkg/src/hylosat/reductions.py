"""Encoders from classical problems into monotone hybrid logic, rewrites
that remove the binder, and brute-force oracles for the source problems."""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from typing import Iterable, Union

from . import fol
from .formula import (
    BOTTOM, TOP, And, At, Bottom, Box, Diamond, Down, Formula, Neg, Nominal, Op, Or, Prop,
    ParseError, SVar, Top, analyze, conj, disj, parse, rename_apart,
)

__all__ = [
    "QbfInstance", "CnfInstance", "OrdInstance", "FolPFormula", "ReductionError",
    "encode_qbf", "encode_3sat", "encode_ord", "encode_folp", "MacroLibrary",
    "skolemize", "eliminate_down_no_at", "oracle_eval",
    "parse_qbf", "parse_dimacs", "parse_ord", "parse_folp",
]


class ReductionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# QBF

@dataclass(frozen=True)
class QbfInstance:
    """Prenex QBF.  ``prefix`` holds ``("exists" | "forall", name)`` pairs;
    the matrix is a formula over :class:`Prop`, ``Neg(Prop)``, ``&``, ``|``."""

    prefix: tuple
    matrix: Formula

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(tuple(q) for q in self.prefix))
        for q, _ in self.prefix:
            if q not in ("exists", "forall"):
                raise ReductionError(f"unknown quantifier {q!r}")
        bound = {v for _, v in self.prefix}
        stack = [self.matrix]
        while stack:
            node = stack.pop()
            if isinstance(node, Neg):
                if not isinstance(node.body, Prop):
                    raise ReductionError("QBF matrix must be in negation normal form")
            elif isinstance(node, Prop):
                if node.name not in bound:
                    raise ReductionError(f"QBF variable {node.name!r} is not quantified")
            elif isinstance(node, (And, Or)):
                stack.extend(node.children())
            elif not isinstance(node, (Top, Bottom)):
                raise ReductionError(f"unexpected {type(node).__name__} in QBF matrix")


_QPREFIX = re.compile(r"\s*(forall|exists)\s+([a-z][a-z0-9_]*)\s*\.")


def parse_qbf(text: str) -> QbfInstance:
    """``forall x. exists y. ((x & y) | (!x & !y))``"""
    prefix = []
    pos = 0
    while True:
        m = _QPREFIX.match(text, pos)
        if not m:
            break
        prefix.append((m.group(1), m.group(2)))
        pos = m.end()
    try:
        matrix = parse(text[pos:])
    except ParseError as exc:
        raise ParseError(exc.message, exc.offset + len(text[:pos].encode("utf-8"))) from None
    return QbfInstance(tuple(prefix), matrix)


def encode_qbf(q: QbfInstance) -> Formula:
    """``down r. <> down s. <> h(q)``; the k-th quantified variable becomes
    the state variable ``x<k>``."""
    def h_matrix(node, env):
        if isinstance(node, Prop):
            return At(SVar("s"), SVar(env[node.name]))
        if isinstance(node, Neg):
            return At(SVar("s"), Diamond(SVar(env[node.body.name])))
        if isinstance(node, And):
            return And(h_matrix(node.left, env), h_matrix(node.right, env))
        if isinstance(node, Or):
            return Or(h_matrix(node.left, env), h_matrix(node.right, env))
        return node

    env = {}
    for k, (_, v) in enumerate(q.prefix):
        env[v] = f"x{k}"
    body = h_matrix(q.matrix, env)
    for k in range(len(q.prefix) - 1, -1, -1):
        quant, _ = q.prefix[k]
        inner = Down(f"x{k}", body)
        modal = Diamond(inner) if quant == "exists" else Box(inner)
        body = At(SVar("r"), modal)
    return Down("r", Diamond(Down("s", Diamond(body))))


def _qbf_truth(q: QbfInstance) -> bool:
    def ev(node, val):
        if isinstance(node, Prop):
            return val[node.name]
        if isinstance(node, Neg):
            return not val[node.body.name]
        if isinstance(node, And):
            return ev(node.left, val) and ev(node.right, val)
        if isinstance(node, Or):
            return ev(node.left, val) or ev(node.right, val)
        return isinstance(node, Top)

    def go(k, val):
        if k == len(q.prefix):
            return ev(q.matrix, val)
        quant, v = q.prefix[k]
        results = (go(k + 1, {**val, v: b}) for b in (False, True))
        return any(results) if quant == "exists" else all(results)

    return go(0, {})


# ---------------------------------------------------------------------------
# 3SAT

@dataclass(frozen=True)
class CnfInstance:
    """Clauses of exactly three DIMACS literals over variables ``1..num_vars``."""

    clauses: tuple
    num_vars: int

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        for c in self.clauses:
            if len(c) != 3:
                raise ReductionError(f"clause {list(c)} does not have exactly 3 literals")
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ReductionError(f"literal {lit} out of range")


def parse_dimacs(text: str) -> CnfInstance:
    num_vars = None
    lits: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) < 4 or parts[1] != "cnf":
                raise ReductionError(f"bad DIMACS header: {line!r}")
            num_vars = int(parts[2])
            continue
        try:
            lits.extend(int(x) for x in line.split())
        except ValueError:
            raise ReductionError(f"bad DIMACS clause line: {line!r}") from None
    if num_vars is None:
        raise ReductionError("missing DIMACS 'p cnf' header")
    clauses, cur = [], []
    for lit in lits:
        if lit == 0:
            clauses.append(tuple(cur))
            cur = []
        else:
            cur.append(lit)
    if cur:
        clauses.append(tuple(cur))
    return CnfInstance(tuple(clauses), num_vars)


def encode_3sat(c: CnfInstance) -> Formula:
    """Nominals ``i0`` (false), ``i1`` (true) and ``x1..xm``; each variable
    nominal must sit on ``i0`` or ``i1``, and each clause needs a literal
    whose nominal sits on the matching one."""
    i0, i1 = Nominal("i0"), Nominal("i1")
    x = [Nominal(f"x{k}") for k in range(c.num_vars + 1)]
    parts = [Diamond(And(i0, Diamond(i1)))]
    for k in range(1, c.num_vars + 1):
        parts.append(Or(Diamond(And(i0, x[k])), Diamond(And(i1, x[k]))))
    for clause in c.clauses:
        lits = [And(i1, x[l]) if l > 0 else And(i0, x[-l]) for l in clause]
        parts.append(Diamond(disj(*lits)))
    return conj(*parts)


def _cnf_truth(c: CnfInstance) -> bool:
    for bits in itertools.product((False, True), repeat=c.num_vars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in cl) for cl in c.clauses):
            return True
    return False


# ---------------------------------------------------------------------------
# reachability on a line graph

_NAME = re.compile(r"[A-Za-z0-9_]+\Z")


@dataclass(frozen=True)
class OrdInstance:
    vertices: tuple
    successor: tuple
    s: str
    t: str

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "successor", tuple(tuple(e) for e in self.successor))
        vs = self.vertices
        if not vs or len(set(vs)) != len(vs):
            raise ReductionError("vertices must be a non-empty list without repeats")
        for v in vs:
            if not isinstance(v, str) or not _NAME.match(v):
                raise ReductionError(f"vertex name {v!r} is not an identifier")
        if self.s not in vs or self.t not in vs:
            raise ReductionError("s and t must be vertices")
        succ, pred = {}, {}
        for e in self.successor:
            if len(e) != 2 or e[0] not in vs or e[1] not in vs:
                raise ReductionError(f"bad successor pair {e!r}")
            a, b = e
            if a in succ or b in pred or a == b:
                raise ReductionError("not a line graph: a vertex has two successors or predecessors")
            succ[a], pred[b] = b, a
        if len(self.successor) != len(vs) - 1:
            raise ReductionError("not a line graph: the edges do not form one chain")
        heads = [v for v in vs if v not in pred]
        walk, cur = 1, heads[0] if len(heads) == 1 else None
        if cur is None:
            raise ReductionError("not a line graph: the edges do not form one chain")
        while cur in succ:
            cur = succ[cur]
            walk += 1
        if walk != len(vs):
            raise ReductionError("not a line graph: the edges do not form one chain")


def parse_ord(text: str) -> OrdInstance:
    try:
        data = json.loads(text)
        return OrdInstance(tuple(data["vertices"]), tuple(map(tuple, data["successor"])),
                           data["s"], data["t"])
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ReductionError(f"malformed ORD instance: {exc}") from None


def encode_ord(o: OrdInstance) -> Formula:
    """Bind every vertex at the first state, move to a fresh state and name
    it ``s``, then push that state along the successor pairs ``|V| - 1``
    times and test whether it reached ``t``."""
    round_ = [(a, b) for a, b in o.successor if b != o.s]
    steps = round_ * (len(o.vertices) - 1)
    body: Formula = At(SVar(o.s), SVar(o.t))
    for a, b in reversed(steps):
        body = At(SVar(a), Down(b, body))
    body = Box(Down(o.s, body))
    for v in reversed(o.vertices):
        body = Down(v, body)
    return body


def _ord_truth(o: OrdInstance) -> bool:
    succ = dict(o.successor)
    cur = o.s
    while True:
        if cur == o.t:
            return True
        if cur not in succ:
            return False
        cur = succ[cur]


# ---------------------------------------------------------------------------
# FOL(<, P)

@dataclass(frozen=True)
class FolPFormula:
    """Prenex formula: ``prefix`` of ``("exists" | "forall", var)`` and a
    quantifier-free matrix with negation only on atoms."""

    prefix: tuple
    matrix: fol.FolFormula

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(tuple(q) for q in self.prefix))
        preds = set()
        stack = [self.matrix]
        while stack:
            node = stack.pop()
            if isinstance(node, fol.FolNot):
                if not isinstance(node.body, (fol.Less, fol.Eq, fol.Pred)):
                    raise ReductionError("matrix must be in negation normal form")
                stack.append(node.body)
            elif isinstance(node, (fol.FolAnd, fol.FolOr)):
                stack.extend((node.left, node.right))
            elif isinstance(node, (fol.Exists, fol.Forall)):
                raise ReductionError("formula is not prenex")
            elif isinstance(node, fol.Pred):
                preds.add(node.name)
                if not isinstance(node.arg, str):
                    raise ReductionError("predicate arguments must be variables")
            elif isinstance(node, (fol.Less, fol.Eq)):
                if not all(isinstance(t, str) for t in (node.left, node.right)):
                    raise ReductionError("numerals are not supported in FOL(<,P) inputs")
        if len(preds) > 1:
            raise ReductionError(f"only one unary predicate is supported, got {sorted(preds)}")
        free = fol.fol_free_vars(self.as_fol())
        if free:
            raise ReductionError(f"free variables: {sorted(free)}")

    def as_fol(self) -> fol.FolFormula:
        out = self.matrix
        for q, v in reversed(self.prefix):
            out = fol.Exists(v, out) if q == "exists" else fol.Forall(v, out)
        return out


def parse_folp(text: str) -> FolPFormula:
    f = fol.parse_fol(text)
    prefix = []
    while isinstance(f, (fol.Exists, fol.Forall)):
        prefix.append(("exists" if isinstance(f, fol.Exists) else "forall", f.var))
        f = f.body
    return FolPFormula(tuple(prefix), f)


class MacroLibrary:
    """Formula macros over state-variable names, anchored at ``anchor``.

    Every use draws fresh bound variables ``r1``, ``r2``, ... avoiding
    ``taken``.
    """

    def __init__(self, anchor: str = "a", taken: Iterable[str] = ()):
        self.a = anchor
        self.taken = set(taken) | {anchor}
        self.counter = 0

    def fresh(self) -> str:
        while True:
            self.counter += 1
            name = f"r{self.counter}"
            if name not in self.taken:
                self.taken.add(name)
                return name

    def dir_suc(self, x: str, y: str) -> Formula:
        z = self.fresh()
        return At(SVar(x), Box(Down(z, Or(At(SVar(y), SVar(z)), At(SVar(y), Diamond(SVar(z)))))))

    def no_dir_pred(self, x: str) -> Formula:
        r = self.fresh()
        return At(SVar(self.a), Box(Down(r, disj(
            At(SVar(x), Diamond(SVar(r))), At(SVar(x), SVar(r)),
            At(SVar(r), Diamond(Diamond(SVar(x))))))))

    def dir_pred(self, x: str) -> Formula:
        r = self.fresh()
        return At(SVar(self.a), Diamond(Down(r, self.dir_suc(r, x))))

    def dense(self, x: str, y: str) -> Formula:
        r = self.fresh()
        return At(SVar(x), Box(Down(r, Or(At(SVar(y), Diamond(SVar(r))), self.no_dir_pred(r)))))

    def sep(self, x: str) -> Formula:
        r = self.fresh()
        return At(SVar(x), Diamond(Down(r, self.dense(x, r))))

    def neg(self, x: str) -> Formula:
        r = self.fresh()
        return And(At(SVar(x), Diamond(Down(r, And(self.dir_suc(x, r), self.sep(r))))),
                   self.no_dir_pred(x))

    def pos(self, x: str) -> Formula:
        r, s = self.fresh(), self.fresh()
        inner = Diamond(Down(s, And(self.dir_suc(r, s), self.sep(s))))
        return And(At(SVar(x), Diamond(Down(r, And(self.dir_suc(x, r), inner)))),
                   self.no_dir_pred(x))

    def sep_m(self, x: str) -> Formula:
        r = self.fresh()
        return At(SVar(x), Diamond(Down(r, And(self.dense(x, r), Or(self.neg(r), self.pos(r))))))

    def psi1(self) -> Formula:
        return self.sep_m(self.a)

    def psi2(self) -> Formula:
        r, s1, s2, t2, s3, t3 = (self.fresh() for _ in range(6))
        case_sep = self.sep_m(r)
        case_neg = And(self.neg(r), Diamond(Down(s1, And(self.dir_suc(r, s1), self.sep_m(s1)))))
        case_pos = And(self.pos(r), Diamond(Down(s2, And(
            self.dir_suc(r, s2), Diamond(Down(t2, And(self.dir_suc(s2, t2), self.sep_m(t2))))))))
        case_mid = And(
            At(SVar(self.a), Diamond(Down(s3, And(self.dir_suc(s3, r), self.pos(s3))))),
            Diamond(Down(t3, And(self.dir_suc(r, t3), self.sep_m(t3)))))
        return At(SVar(self.a), Box(Down(r, disj(case_sep, case_neg, case_pos, case_mid))))


def encode_folp(f: FolPFormula, anchor: str = "a") -> Formula:
    """Monotone (<>, [], down, @)-formula with the single free state variable
    ``anchor``, satisfiable over linear orders iff ``f`` holds in (N, <, P)."""
    names = {v for _, v in f.prefix}
    rename: dict[str, str] = {}
    taken = set(names) | {anchor}
    for v in sorted(names):
        if v == anchor or re.fullmatch(r"r\d+", v):
            k = 1
            while f"{v}_{k}" in taken:
                k += 1
            rename[v] = f"{v}_{k}"
            taken.add(rename[v])
    lib = MacroLibrary(anchor, taken | set(rename.values()))

    def var(v):
        return rename.get(v, v)

    def m(node, positive=True):
        t = type(node)
        if t is fol.FolNot:
            return m(node.body, False)
        if t is fol.Pred:
            return lib.pos(var(node.arg)) if positive else lib.neg(var(node.arg))
        if t is fol.Less:
            x, y = var(node.left), var(node.right)
            if positive:
                return At(SVar(x), Diamond(SVar(y)))
            return Or(At(SVar(x), SVar(y)), At(SVar(y), Diamond(SVar(x))))
        if t is fol.Eq:
            x, y = var(node.left), var(node.right)
            if positive:
                return At(SVar(x), SVar(y))
            return Or(At(SVar(x), Diamond(SVar(y))), At(SVar(y), Diamond(SVar(x))))
        if t is fol.FolAnd:
            return And(m(node.left), m(node.right))
        if t is fol.FolOr:
            return Or(m(node.left), m(node.right))
        if t is fol.FolTrue:
            return TOP if positive else BOTTOM
        if t is fol.FolFalse:
            return BOTTOM if positive else TOP
        raise ReductionError(f"unexpected {t.__name__} in matrix")

    body = m(f.matrix)
    for q, v in reversed(f.prefix):
        x = var(v)
        if q == "exists":
            body = At(SVar(anchor), Diamond(Down(x, And(Or(lib.neg(x), lib.pos(x)), body))))
        else:
            body = At(SVar(anchor), Box(Down(x, disj(lib.sep(x), lib.dir_pred(x), body))))
    return conj(lib.psi1(), lib.psi2(), body)


# ---------------------------------------------------------------------------
# binder removal

def _fresh_nominal(base: str, taken: set[str]) -> str:
    name, k = base, 0
    while name in taken:
        k += 1
        name = f"{base}{k}"
    taken.add(name)
    return name


def _names(f: Formula) -> set[str]:
    out = set()
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, (Nominal, SVar, Prop)):
            out.add(node.name)
        elif isinstance(node, Down):
            out.add(node.var)
        elif isinstance(node, At):
            out.add(node.target.name)
        stack.extend(node.children())
    return out


def skolemize(f: Formula) -> Formula:
    """Replace each binder ``down x. psi`` by ``#ix & psi[x := #ix]`` and each
    free state variable by a fresh nominal.  Only for box-free formulas,
    where every binder is evaluated at most once."""
    return _skolemize_with_table(f)[0]


def _skolemize_with_table(f: Formula) -> tuple[Formula, dict[str, str]]:
    sig = analyze(f).signature
    if Op.BOX in sig.operators:
        raise ReductionError("skolemization needs a box-free formula")
    if not sig.monotone:
        raise ReductionError("skolemization needs a negation-free formula")
    f = rename_apart(f)
    taken = _names(f)
    table: dict[str, str] = {}

    def nominal_for(v):
        if v not in table:
            table[v] = _fresh_nominal("i" + v, taken)
        return table[v]

    def go(node):
        t = type(node)
        if t is SVar:
            return Nominal(nominal_for(node.name))
        if t is Down:
            return And(Nominal(nominal_for(node.var)), go(node.body))
        if t is At:
            tgt = node.target
            if isinstance(tgt, SVar):
                tgt = Nominal(nominal_for(tgt.name))
            return At(tgt, go(node.body))
        if t in (And, Or):
            return t(go(node.left), go(node.right))
        if t is Diamond:
            return Diamond(go(node.body))
        return node

    out = go(f)
    free = analyze(f).free_svars
    return out, {v: table[v] for v in sorted(free)}


def eliminate_down_no_at(f: Formula) -> Formula:
    """Remove binders from an @-free formula.

    Evaluation only moves strictly forward, so a bound occurrence is true
    exactly when no modal operator separates it from its binder.  Free state
    variables become nominals of the same name (renamed on a clash).
    """
    return _eliminate_down_with_table(f)[0]


def _eliminate_down_with_table(f: Formula) -> tuple[Formula, dict[str, str]]:
    sig = analyze(f).signature
    if Op.AT in sig.operators:
        raise ReductionError("binder elimination needs an @-free formula")
    if not sig.monotone:
        raise ReductionError("binder elimination needs a negation-free formula")
    f = rename_apart(f)
    taken = _names(f)
    free_nom: dict[str, str] = {}
    nom_names = {n.name for n in _iter(f) if isinstance(n, Nominal)}
    nom_names |= {n.target.name for n in _iter(f) if isinstance(n, At)}
    taken |= nom_names

    def go(node, depth, binders):
        t = type(node)
        if t is SVar:
            if node.name in binders:
                return TOP if binders[node.name] == depth else BOTTOM
            if node.name not in free_nom:
                free_nom[node.name] = (node.name if node.name not in nom_names
                                       else _fresh_nominal(node.name, taken))
            return Nominal(free_nom[node.name])
        if t is Down:
            return go(node.body, depth, {**binders, node.var: depth})
        if t in (Diamond, Box):
            return t(go(node.body, depth + 1, binders))
        if t in (And, Or):
            return t(go(node.left, depth, binders), go(node.right, depth, binders))
        return node

    out = go(f, 0, {})
    return out, dict(sorted(free_nom.items()))


def _iter(f: Formula):
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(node.children())


# ---------------------------------------------------------------------------

def oracle_eval(instance: Union[QbfInstance, CnfInstance, OrdInstance]) -> bool:
    """Brute-force truth of a source instance."""
    if isinstance(instance, QbfInstance):
        if len(instance.prefix) > 12:
            raise ReductionError("QBF too large for the brute-force oracle")
        return _qbf_truth(instance)
    if isinstance(instance, CnfInstance):
        if instance.num_vars > 16:
            raise ReductionError("CNF too large for the brute-force oracle")
        return _cnf_truth(instance)
    if isinstance(instance, OrdInstance):
        return _ord_truth(instance)
    raise TypeError(f"no oracle for {type(instance).__name__}")
