"""Hybrid-logic formulas: syntax tree, concrete syntax, and static analyses.

Concrete syntax (ASCII only)::

    formula := disj
    disj    := conj ('|' conj)*
    conj    := unary ('&' unary)*
    unary   := 'true' | 'false' | atom | '<>' unary | '[]' unary | '!' unary
             | 'down' NAME '.' unary | '@' target unary | '(' formula ')'
    atom    := PROP | '#'NAME | '$'NAME

Propositions are bare lower-case identifiers, nominals carry ``#`` and
state variables carry ``$``.  The variable after ``down`` is written
without sigil; the target after ``@`` carries one (a bare name is read as a
state variable).

Every node of a formula is addressed by its preorder index (its *node id*),
see :func:`index`.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

__all__ = [
    "Formula", "Prop", "Nominal", "SVar", "Top", "Bottom", "Neg", "And", "Or",
    "Diamond", "Box", "Down", "At", "TOP", "BOTTOM",
    "Op", "OccurrenceClass", "FragmentSignature", "Analysis", "FormulaIndex",
    "ParseError", "parse", "to_text", "analyze", "index", "rename_apart",
    "normalize_monotone", "classify_occurrence", "size", "modal_depth",
    "free_svars", "conj", "disj", "substitute_atoms",
]


class Formula:
    """Base class of all formula nodes.  Nodes are immutable and hashable."""

    __slots__ = ()

    def children(self) -> tuple["Formula", ...]:
        return ()

    def __str__(self) -> str:
        return to_text(self)

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)


def _cached_hash(cls):
    # dataclass(frozen) recomputes recursive hashes on every call; formulas are
    # used as memo keys on hot paths, so cache the value on first use.
    def __hash__(self):
        try:
            return self._h
        except AttributeError:
            h = hash((cls.__name__,) + tuple(getattr(self, f) for f in self.__dataclass_fields__ if f != "_h"))
            object.__setattr__(self, "_h", h)
            return h

    cls.__hash__ = __hash__
    return cls


@_cached_hash
@dataclass(frozen=True, repr=False)
class Prop(Formula):
    name: str

    def __repr__(self):
        return f"Prop({self.name!r})"


@_cached_hash
@dataclass(frozen=True, repr=False)
class Nominal(Formula):
    name: str

    def __repr__(self):
        return f"Nominal({self.name!r})"


@_cached_hash
@dataclass(frozen=True, repr=False)
class SVar(Formula):
    name: str

    def __repr__(self):
        return f"SVar({self.name!r})"


@_cached_hash
@dataclass(frozen=True, repr=False)
class Top(Formula):
    def __repr__(self):
        return "Top()"


@_cached_hash
@dataclass(frozen=True, repr=False)
class Bottom(Formula):
    def __repr__(self):
        return "Bottom()"


TOP = Top()
BOTTOM = Bottom()


@_cached_hash
@dataclass(frozen=True, repr=False)
class Neg(Formula):
    body: Formula

    def children(self):
        return (self.body,)

    def __repr__(self):
        return f"Neg({self.body!r})"


@_cached_hash
@dataclass(frozen=True, repr=False)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)

    def __repr__(self):
        return f"And({self.left!r}, {self.right!r})"


@_cached_hash
@dataclass(frozen=True, repr=False)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)

    def __repr__(self):
        return f"Or({self.left!r}, {self.right!r})"


@_cached_hash
@dataclass(frozen=True, repr=False)
class Diamond(Formula):
    body: Formula

    def children(self):
        return (self.body,)

    def __repr__(self):
        return f"Diamond({self.body!r})"


@_cached_hash
@dataclass(frozen=True, repr=False)
class Box(Formula):
    body: Formula

    def children(self):
        return (self.body,)

    def __repr__(self):
        return f"Box({self.body!r})"


@_cached_hash
@dataclass(frozen=True, repr=False)
class Down(Formula):
    var: str
    body: Formula

    def children(self):
        return (self.body,)

    def __repr__(self):
        return f"Down({self.var!r}, {self.body!r})"


@_cached_hash
@dataclass(frozen=True, repr=False)
class At(Formula):
    target: Union[Nominal, SVar]
    body: Formula

    def __post_init__(self):
        if not isinstance(self.target, (Nominal, SVar)):
            raise TypeError("@ target must be a Nominal or SVar")

    def children(self):
        return (self.body,)

    def __repr__(self):
        return f"At({self.target!r}, {self.body!r})"


def conj(*parts: Formula) -> Formula:
    """Left-nested conjunction; ``conj()`` is ``TOP``."""
    if not parts:
        return TOP
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(*parts: Formula) -> Formula:
    if not parts:
        return BOTTOM
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


# ---------------------------------------------------------------------------
# parsing and printing

class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte {offset}")
        self.message = message
        self.offset = offset


_TOKEN = re.compile(
    r"\s*(?:(?P<sym><>|\[\]|[()&|!@.])"
    r"|(?P<nom>#[A-Za-z0-9_]+)|(?P<svar>\$[A-Za-z0-9_]+)"
    r"|(?P<word>[A-Za-z0-9_]+)|(?P<bad>\S))"
)
_PROP = re.compile(r"[a-z][a-z0-9_]*\Z")
_KEYWORDS = {"true", "false", "down"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None or m.lastgroup is None:
            break  # trailing whitespace
        kind = m.lastgroup
        value = m.group(kind)
        start = m.start(kind)
        if kind == "bad":
            if value in "#$":
                raise ParseError(f"sigil {value!r} without a name", _byte(text, start))
            raise ParseError(f"unknown sigil or character {value!r}", _byte(text, start))
        toks.append((kind, value, start))
        pos = m.end()
    return toks


def _byte(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def error(self, msg):
        tok = self.peek()
        where = tok[2] if tok else len(self.text)
        raise ParseError(msg, _byte(self.text, where))

    def take(self, value=None):
        tok = self.peek()
        if tok is None:
            self.error(f"expected {value!r}" if value else "unexpected end of input")
        if value is not None and tok[1] != value:
            self.error(f"expected {value!r}, found {tok[1]!r}")
        self.i += 1
        return tok

    def formula(self):
        left = self.conj()
        while self.peek() and self.peek()[1] == "|":
            self.take()
            left = Or(left, self.conj())
        return left

    def conj(self):
        left = self.unary()
        while self.peek() and self.peek()[1] == "&":
            self.take()
            left = And(left, self.unary())
        return left

    def unary(self):
        tok = self.peek()
        if tok is None:
            self.error("unexpected end of input")
        kind, value, _ = tok
        if kind == "sym":
            if value == "<>":
                self.take()
                return Diamond(self.unary())
            if value == "[]":
                self.take()
                return Box(self.unary())
            if value == "!":
                self.take()
                return Neg(self.unary())
            if value == "(":
                self.take()
                inner = self.formula()
                self.take(")")
                return inner
            if value == "@":
                self.take()
                return At(self.target(), self.unary())
            self.error(f"unexpected {value!r}")
        if kind == "nom":
            self.take()
            return Nominal(value[1:])
        if kind == "svar":
            self.take()
            return SVar(value[1:])
        # bare word
        if value == "true":
            self.take()
            return TOP
        if value == "false":
            self.take()
            return BOTTOM
        if value == "down":
            self.take()
            var = self.take()
            if var[0] != "word" or var[1] in _KEYWORDS:
                self.i -= 1
                self.error("expected a variable name after 'down'")
            self.take(".")
            return Down(var[1], self.unary())
        if _PROP.match(value):
            self.take()
            return Prop(value)
        self.error(f"invalid proposition name {value!r}")

    def target(self):
        tok = self.take()
        kind, value, _ = tok
        if kind == "nom":
            return Nominal(value[1:])
        if kind == "svar":
            return SVar(value[1:])
        if kind == "word" and value not in _KEYWORDS:
            return SVar(value)
        self.i -= 1
        self.error("expected a nominal or state variable after '@'")


def parse(text: str) -> Formula:
    """Parse ``text`` into a :class:`Formula`; raises :class:`ParseError`."""
    p = _Parser(text)
    if not p.toks:
        raise ParseError("empty formula", _byte(text, len(text)))
    f = p.formula()
    if p.peek() is not None:
        p.error(f"unexpected trailing {p.peek()[1]!r}")
    return f


def to_text(f: Formula) -> str:
    """Canonical ASCII rendering; ``parse(to_text(f)) == f``."""
    out: list[str] = []
    stack: list = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, str):
            out.append(node)
        elif isinstance(node, Prop):
            out.append(node.name)
        elif isinstance(node, Nominal):
            out.append("#" + node.name)
        elif isinstance(node, SVar):
            out.append("$" + node.name)
        elif isinstance(node, Top):
            out.append("true")
        elif isinstance(node, Bottom):
            out.append("false")
        elif isinstance(node, Neg):
            out.append("!")
            stack.append(node.body)
        elif isinstance(node, (And, Or)):
            sep = " & " if isinstance(node, And) else " | "
            out.append("(")
            stack.extend([")", node.right, sep, node.left])
        elif isinstance(node, Diamond):
            out.append("<> ")
            stack.append(node.body)
        elif isinstance(node, Box):
            out.append("[] ")
            stack.append(node.body)
        elif isinstance(node, Down):
            out.append(f"down {node.var}. ")
            stack.append(node.body)
        elif isinstance(node, At):
            sigil = "#" if isinstance(node.target, Nominal) else "$"
            out.append(f"@{sigil}{node.target.name} ")
            stack.append(node.body)
        else:
            raise TypeError(f"not a formula: {node!r}")
    return "".join(out)


# ---------------------------------------------------------------------------
# node addressing

@dataclass
class FormulaIndex:
    """Preorder numbering of the nodes of a formula.

    ``nodes[k]`` is the node with id ``k`` and ``parent[k]`` its parent id
    (``-1`` for the root).  ``end[k]`` is one past the last id inside the
    subtree of ``k``, so ``j`` lies below ``k`` iff ``k < j < end[k]``.
    """

    nodes: list[Formula]
    parent: list[int]
    end: list[int] = field(default_factory=list)

    def __len__(self):
        return len(self.nodes)

    def ancestors(self, k: int) -> Iterator[int]:
        k = self.parent[k]
        while k >= 0:
            yield k
            k = self.parent[k]

    def contains(self, k: int, j: int) -> bool:
        return k < j < self.end[k]


def index(f: Formula) -> FormulaIndex:
    nodes: list[Formula] = []
    parent: list[int] = []
    stack = [(f, -1)]
    while stack:
        node, par = stack.pop()
        nodes.append(node)
        parent.append(par)
        me = len(nodes) - 1
        for child in reversed(node.children()):
            stack.append((child, me))
    # subtrees are contiguous in preorder; propagate ends bottom-up
    end = list(range(1, len(nodes) + 1))
    for k in range(len(nodes) - 1, -1, -1):
        p = parent[k]
        if p >= 0 and end[k] > end[p]:
            end[p] = end[k]
    return FormulaIndex(nodes, parent, end)


def size(f: Formula) -> int:
    """Number of nodes (atoms, constants, connectives and operators)."""
    n = 0
    stack = [f]
    while stack:
        node = stack.pop()
        n += 1
        stack.extend(node.children())
    return n


# ---------------------------------------------------------------------------
# analyses

class Op(str, enum.Enum):
    DIAMOND = "diamond"
    BOX = "box"
    DOWN = "down"
    AT = "at"

    def __str__(self):
        return self.value


_OP_OF = {Diamond: Op.DIAMOND, Box: Op.BOX, Down: Op.DOWN, At: Op.AT}


@dataclass(frozen=True)
class FragmentSignature:
    operators: frozenset
    monotone: bool
    uses_props: bool
    uses_nominals: bool
    uses_svars: bool = False

    def within(self, allowed) -> bool:
        """Membership in HL(O) (or MHL(O) when monotone) for ``O = allowed``."""
        return self.operators <= frozenset(allowed)


@dataclass(frozen=True)
class Analysis:
    signature: FragmentSignature
    modal_depth: int
    free_svars: frozenset

    def __iter__(self):
        return iter((self.signature, self.modal_depth, self.free_svars))


def analyze(f: Formula) -> Analysis:
    ops = set()
    monotone = True
    props = noms = svars = False
    free: set[str] = set()
    depth = 0
    # (node, modal depth so far, bound names)
    stack = [(f, 0, frozenset())]
    while stack:
        node, d, bound = stack.pop()
        depth = max(depth, d)
        t = type(node)
        if t in _OP_OF:
            ops.add(_OP_OF[t])
        if t is Neg:
            monotone = False
        elif t is Prop:
            props = True
        elif t is Nominal:
            noms = True
        elif t is SVar:
            svars = True
            if node.name not in bound:
                free.add(node.name)
        elif t is At:
            if isinstance(node.target, Nominal):
                noms = True
            else:
                svars = True
                if node.target.name not in bound:
                    free.add(node.target.name)
        if t is Down:
            stack.append((node.body, d, bound | {node.var}))
        elif t in (Diamond, Box):
            stack.append((node.body, d + 1, bound))
        else:
            for c in node.children():
                stack.append((c, d, bound))
    sig = FragmentSignature(frozenset(ops), monotone, props, noms, svars)
    return Analysis(sig, depth, frozenset(free))


def modal_depth(f: Formula) -> int:
    return analyze(f).modal_depth


def free_svars(f: Formula) -> frozenset:
    return analyze(f).free_svars


def _all_names(f: Formula) -> set[str]:
    names = set()
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, (Nominal, SVar, Prop)):
            names.add(node.name)
        elif isinstance(node, Down):
            names.add(node.var)
        elif isinstance(node, At):
            names.add(node.target.name)
        stack.extend(node.children())
    return names


def _fresh(base: str, taken: set[str]) -> str:
    k = 1
    while f"{base}{k}" in taken:
        k += 1
    return f"{base}{k}"


def _rebuild(node: Formula, kids: list[Formula]) -> Formula:
    t = type(node)
    if t in (And, Or):
        return t(kids[0], kids[1])
    if t in (Neg, Diamond, Box):
        return t(kids[0])
    if t is Down:
        return Down(node.var, kids[0])
    if t is At:
        return At(node.target, kids[0])
    return node


def rename_apart(f: Formula) -> Formula:
    """Rename binders so no variable is bound twice or both free and bound.

    The first binder of a name that is not free anywhere keeps its name;
    every other binder gets ``name1``, ``name2``, ... (first unused).
    """
    taken = _all_names(f)
    used = set(free_svars(f))

    def go(node: Formula, env: dict) -> Formula:
        t = type(node)
        if t is SVar:
            new = env.get(node.name, node.name)
            return node if new == node.name else SVar(new)
        if t is At:
            body = go(node.body, env)
            tgt = node.target
            if isinstance(tgt, SVar) and env.get(tgt.name, tgt.name) != tgt.name:
                tgt = SVar(env[tgt.name])
            return At(tgt, body)
        if t is Down:
            name = node.var
            if name in used:
                name = _fresh(node.var, taken | used)
                taken.add(name)
            used.add(name)
            return Down(name, go(node.body, {**env, node.var: name}))
        kids = node.children()
        if not kids:
            return node
        return _rebuild(node, [go(c, env) for c in kids])

    return go(f, {})


def substitute_atoms(f: Formula, fn) -> Formula:
    """Rebuild ``f`` bottom-up, replacing each atom node ``a`` by ``fn(a)``.

    ``fn`` receives Prop/Nominal/SVar/Top/Bottom nodes and returns a formula.
    @-targets are left alone.
    """
    def go(node):
        kids = node.children()
        if not kids:
            return fn(node)
        return _rebuild(node, [go(c) for c in kids])

    return go(f)


def normalize_monotone(f: Formula, binder_mode: bool) -> Formula:
    """Replace propositions by ``true``; in binder mode, nominals by fresh
    free state variables (one per nominal name).

    Raises ``ValueError`` if ``f`` contains negation.
    """
    if not analyze(f).signature.monotone:
        raise ValueError("normalize_monotone: formula contains negation")
    mapping: dict[str, str] = {}
    if binder_mode:
        taken = _all_names(f)
        noms = sorted({n.name for n in _atoms(f) if isinstance(n, Nominal)})
        for name in noms:
            cand = "v" + name
            if cand in taken:
                cand = _fresh(cand, taken)
            taken.add(cand)
            mapping[name] = cand

    def go(node):
        t = type(node)
        if t is Prop:
            return TOP
        if t is Nominal and binder_mode:
            return SVar(mapping[node.name])
        if t is At:
            tgt = node.target
            if binder_mode and isinstance(tgt, Nominal):
                tgt = SVar(mapping[tgt.name])
            return At(tgt, go(node.body))
        kids = node.children()
        if not kids:
            return node
        return _rebuild(node, [go(c) for c in kids])

    return go(f)


def _atoms(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, (Prop, Nominal, SVar)):
            yield node
        elif isinstance(node, At):
            yield node.target
        stack.extend(node.children())


class OccurrenceClass(enum.Enum):
    FREE = "free"
    BOUND_BY_BOX = "bound-by-box"
    BOUND_BY_DOWN = "bound-by-down"
    BOUND_BY_AT = "bound-by-at"


def classify_occurrence(f: Formula, atom_node: int, idx: Optional[FormulaIndex] = None) -> OccurrenceClass:
    """Class of the nominal/state-variable occurrence with node id ``atom_node``.

    Walks towards the root and stops at the first box, the first @, or the
    binder of the occurrence's own name; other binders are transparent.
    """
    idx = idx if idx is not None else index(f)
    if not 0 <= atom_node < len(idx):
        raise IndexError(f"no node with id {atom_node}")
    atom = idx.nodes[atom_node]
    if not isinstance(atom, (Nominal, SVar)):
        raise ValueError(f"node {atom_node} is not a nominal or state variable: {atom!r}")
    for k in idx.ancestors(atom_node):
        node = idx.nodes[k]
        if isinstance(node, Box):
            return OccurrenceClass.BOUND_BY_BOX
        if isinstance(node, At):
            return OccurrenceClass.BOUND_BY_AT
        if isinstance(node, Down) and isinstance(atom, SVar) and node.var == atom.name:
            return OccurrenceClass.BOUND_BY_DOWN
    return OccurrenceClass.FREE
