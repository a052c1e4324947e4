"""Small-model search for monotone (<>, [], @)-formulas with nominals.

A satisfiable formula of modal depth ``md`` has a model built from the
nominal states, with at most ``md + 2`` discrete points in each gap between
consecutive nominal states, optionally preceded (over general linear
orders) by a dense block.  States before the first nominal state are never
visited, so they are dropped.  Over the naturals everything after the last
nominal state is one infinite tail whose states are all alike; it obeys the
same truth rules as a trailing dense block.

The shape is guessed symbolically and handed to a SAT solver.  A brute
force enumerator over the same shapes is kept as a cross-check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from pysat.formula import IDPool
from pysat.solvers import Solver

from .formula import (
    And, At, Bottom, Box, Diamond, Formula, Nominal, Or, Top, analyze,
)
from .kripke import Dense, Point, SegmentedLinearModel, check_segmented

__all__ = ["SearchResult", "search", "enumerate_models", "enumerate_search"]

POINT, DENSE = "point", "dense"


@dataclass
class SearchResult:
    model: SegmentedLinearModel
    state: int  # segment index of the evaluation point


def _subformulas(f: Formula) -> list[Formula]:
    seen: dict[Formula, None] = {}
    stack = [f]
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen[node] = None
        stack.extend(node.children())
    return list(seen)


def _nominals(f: Formula) -> list[str]:
    out = set()
    for node in _subformulas(f):
        if isinstance(node, Nominal):
            out.add(node.name)
        elif isinstance(node, At):
            out.add(node.target.name)
    return sorted(out)


def _check_fragment(f: Formula):
    for node in _subformulas(f):
        if not isinstance(node, (And, Or, Top, Bottom, Nominal, Diamond, Box, At)):
            raise ValueError(f"small-model search expects monotone (<>, [], @) formulas, got {type(node).__name__}")
        if isinstance(node, At) and not isinstance(node.target, Nominal):
            raise ValueError("small-model search expects nominal @-targets")


def _fresh(base: str, taken) -> str:
    name, k = base, 0
    while name in taken:
        k += 1
        name = f"{base}{k}"
    return name


def _layout(k: int, gap: int, frame: str):
    """Slots as (kind, role, index): nominal slot j is ("point", "nom", j),
    gap points before it ("point", "gap", j), dense blocks ("dense", ...)."""
    slots = []
    for j in range(k):
        if j:
            if frame == "lin":
                slots.append((DENSE, "gap", j))
            slots.extend((POINT, "gap", j) for _ in range(gap))
        slots.append((POINT, "nom", j))
    if frame == "lin":
        slots.append((DENSE, "tail", k))
        slots.extend((POINT, "tail", k) for _ in range(gap))
    else:
        slots.append((DENSE, "omega", k))
    return slots


def search(f: Formula, frame: str, gap: Optional[int] = None,
           solver: str = "m22") -> Optional[SearchResult]:
    """Find a small model of ``f`` over ``frame`` ("nat" or "lin")."""
    _check_fragment(f)
    if frame not in ("nat", "lin"):
        raise ValueError(f"unknown frame {frame!r}")
    noms = _nominals(f)
    start = _fresh("start", set(noms))
    noms = noms + [start]
    k = len(noms)
    if gap is None:
        gap = analyze(f).modal_depth + 2
    slots = _layout(k, gap, frame)
    n = len(slots)
    subs = _subformulas(f)
    pool = IDPool()
    var = pool.id
    cls: list[list[int]] = []

    pres = [var(("pres", b)) for b in range(n)]
    nom_slots = [b for b, s in enumerate(slots) if s[1] == "nom"]

    # structural constraints
    cls.append([pres[nom_slots[0]]])
    for a, b in zip(nom_slots, nom_slots[1:]):
        cls.append([-pres[b], pres[a]])
    for b, (kind, role, j) in enumerate(slots):
        if role == "gap":
            owner = nom_slots[j]
            cls.append([-pres[b], pres[owner]])
        if role == "omega":
            cls.append([pres[b]])
        # points in a gap fill from the left
        if kind == POINT and role in ("gap", "tail") and b + 1 < n:
            nxt = slots[b + 1]
            if nxt[0] == POINT and nxt[1] == role and nxt[2] == j:
                cls.append([-pres[b + 1], pres[b]])

    asg = {(name, b): var(("nom", name, b)) for name in noms for b in nom_slots}
    for name in noms:
        lits = [asg[name, b] for b in nom_slots]
        cls.append(lits)
        for x, y in itertools.combinations(lits, 2):
            cls.append([-x, -y])
        for b in nom_slots:
            cls.append([-asg[name, b], pres[b]])
    for b in nom_slots:
        cls.append([-pres[b]] + [asg[name, b] for name in noms])

    def T(b, g):
        return var(("t", b, g))

    def later(b, g):
        # some present slot at or after b satisfies g
        return var(("later", b, g)) if b < n else None

    def every(b, g):
        # every present slot at or after b satisfies g
        return var(("every", b, g)) if b < n else None

    def at(name, g):
        return var(("at", name, g))

    dense = [s[0] == DENSE for s in slots]
    need_later, need_every, need_at = set(), set(), set()

    for g in subs:
        t = type(g)
        for b in range(n):
            tb = T(b, g)
            if t is Top:
                continue
            if t is Bottom:
                cls.append([-tb])
            elif t is Nominal:
                if slots[b][1] == "nom":
                    cls.append([-tb, asg[g.name, b]])
                else:
                    cls.append([-tb])
            elif t is And:
                cls.append([-tb, T(b, g.left)])
                cls.append([-tb, T(b, g.right)])
            elif t is Or:
                cls.append([-tb, T(b, g.left), T(b, g.right)])
            elif t is Diamond:
                lits = [-tb]
                if dense[b]:
                    lits.append(T(b, g.body))
                if b + 1 < n:
                    lits.append(later(b + 1, g.body))
                    need_later.add(g.body)
                cls.append(lits)
            elif t is Box:
                if dense[b]:
                    cls.append([-tb, T(b, g.body)])
                if b + 1 < n:
                    cls.append([-tb, every(b + 1, g.body)])
                    need_every.add(g.body)
            elif t is At:
                cls.append([-tb, at(g.target.name, g.body)])
                need_at.add((g.target.name, g.body))

    for g in need_later:
        for b in range(n):
            here = var(("here", b, g))
            cls.append([-here, pres[b]])
            cls.append([-here, T(b, g)])
            lits = [-later(b, g), here]
            if b + 1 < n:
                lits.append(later(b + 1, g))
            cls.append(lits)
    for g in need_every:
        for b in range(n):
            cls.append([-every(b, g), -pres[b], T(b, g)])
            if b + 1 < n:
                cls.append([-every(b, g), every(b + 1, g)])
    for name, g in need_at:
        lits = [-at(name, g)]
        for b in nom_slots:
            both = var(("atb", name, b, g))
            cls.append([-both, asg[name, b]])
            cls.append([-both, T(b, g)])
            lits.append(both)
        cls.append(lits)

    root = at(start, f)
    cls.append([root])
    lits = [-root]
    for b in nom_slots:
        both = var(("atb", start, b, f))
        cls.append([-both, asg[start, b]])
        cls.append([-both, T(b, f)])
        lits.append(both)
    cls.append(lits)

    with Solver(name=solver, bootstrap_with=cls) as s:
        if not s.solve():
            return None
        true = {v for v in s.get_model() if v > 0}

    segments = []
    start_seg = None
    for b, (kind, role, j) in enumerate(slots):
        if pres[b] not in true:
            continue
        if kind == DENSE:
            if segments and isinstance(segments[-1], Dense):
                continue
            segments.append(Dense())
            continue
        here = frozenset(name for name in noms if role == "nom" and asg[name, b] in true)
        if start in here:
            start_seg = len(segments)
        segments.append(Point(here - {start}))
    model = SegmentedLinearModel(tuple(segments))
    if not check_segmented(model, start_seg, f):
        raise AssertionError("decoded small model does not satisfy the formula")
    return SearchResult(model, start_seg)


# ---------------------------------------------------------------------------
# explicit enumeration

def enumerate_models(nominals, gap: int, frame: str):
    """All segmented shapes used by :func:`search`, nominals placed in every
    order (ties allowed).  Exponential; for tests."""
    nominals = list(nominals)
    gap_shapes = []
    for d in ((False, True) if frame == "lin" else (False,)):
        for p in range(gap + 1):
            gap_shapes.append((d, p))

    def ordered_partitions(items):
        if not items:
            yield []
            return
        for r in range(1, len(items) + 1):
            for first in itertools.combinations(items, r):
                rest = [x for x in items if x not in first]
                for tail in ordered_partitions(rest):
                    yield [frozenset(first)] + tail

    def segs_for(d, p):
        out = [Dense()] if d else []
        return out + [Point() for _ in range(p)]

    tails = gap_shapes if frame == "lin" else [(True, 0)]
    parts = list(ordered_partitions(nominals)) if nominals else [[]]
    for part in parts:
        if not part:
            # no nominal at all: a single evaluation point
            for td, tp in tails:
                yield SegmentedLinearModel(tuple([Point()] + segs_for(td, tp)))
            continue
        for inner in itertools.product(gap_shapes, repeat=len(part) - 1):
            for td, tp in tails:
                segs = [Point(part[0])]
                for (d, p), group in zip(inner, part[1:]):
                    segs += segs_for(d, p)
                    segs.append(Point(group))
                segs += segs_for(td, tp)
                merged = []
                for s in segs:
                    if isinstance(s, Dense) and merged and isinstance(merged[-1], Dense):
                        continue
                    merged.append(s)
                yield SegmentedLinearModel(tuple(merged))


def enumerate_search(f: Formula, frame: str, gap: Optional[int] = None) -> Optional[SearchResult]:
    """Brute-force counterpart of :func:`search` over the same shapes, with
    the evaluation point again named by a fresh nominal."""
    _check_fragment(f)
    if gap is None:
        gap = analyze(f).modal_depth + 2
    noms = _nominals(f)
    start = _fresh("start", set(noms))
    for model in enumerate_models(noms + [start], gap, frame):
        e = model.nominal_index()[start]
        segs = list(model.segments)
        segs[e] = Point(segs[e].nominals - {start})
        model = SegmentedLinearModel(tuple(segs))
        if check_segmented(model, e, f):
            return SearchResult(model, e)
    return None
