"""Explicit linear Kripke models and a reference model checker.

States of a :class:`FiniteLinearModel` are ``0..size-1`` ordered by ``<``;
the accessibility relation is the strict order, so ``<>`` and ``[]`` look
strictly forward.  Truth sets are computed as integer bitmasks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

from .formula import (
    And, At, Bottom, Box, Diamond, Down, Formula, Neg, Nominal, Or, Prop, SVar, Top,
    analyze,
)

__all__ = [
    "ModelError", "FiniteLinearModel", "Point", "Dense", "SegmentedLinearModel",
    "QuotientResult", "check_finite", "extension", "sat_search_finite", "quotient",
    "check_segmented", "segmented_extension", "model_from_json", "model_to_json",
]


class ModelError(ValueError):
    """Malformed model, or a formula atom the model does not interpret."""


@dataclass(frozen=True)
class FiniteLinearModel:
    size: int
    nominals: Mapping[str, int] = field(default_factory=dict)
    svars: Mapping[str, int] = field(default_factory=dict)
    props: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        if self.size < 1:
            raise ModelError("a model needs at least one state")
        for kind, table in (("nominal", self.nominals), ("state variable", self.svars)):
            for name, s in table.items():
                if not (isinstance(s, int) and 0 <= s < self.size):
                    raise ModelError(f"{kind} {name!r} points outside the model: {s!r}")
        for name, states in self.props.items():
            if any(not 0 <= s < self.size for s in states):
                raise ModelError(f"proposition {name!r} holds outside the model")

    @property
    def full(self) -> int:
        return (1 << self.size) - 1

    def nominal_states(self) -> set[int]:
        return set(self.nominals.values())

    def with_svars(self, svars: Mapping[str, int]) -> "FiniteLinearModel":
        return FiniteLinearModel(self.size, dict(self.nominals), dict(svars), dict(self.props))


def _prop_mask(states) -> int:
    m = 0
    for s in states:
        m |= 1 << s
    return m


def _diamond(mask: int) -> int:
    # states strictly below the highest member of mask
    return (1 << (mask.bit_length() - 1)) - 1 if mask else 0


def _box(mask: int, full: int) -> int:
    # states at or above the highest failing state
    miss = full & ~mask
    if not miss:
        return full
    return full & ~((1 << (miss.bit_length() - 1)) - 1)


def extension(m: FiniteLinearModel, f: Formula, g: Optional[Mapping[str, int]] = None,
              memo: Optional[dict] = None) -> int:
    """Bitmask of the states of ``m`` where ``f`` holds under assignment ``g``.

    ``g`` defaults to ``m.svars``.  ``memo`` may be shared between calls on
    the same model to reuse subformula results.
    """
    g = dict(m.svars if g is None else g)
    memo = {} if memo is None else memo
    full = m.full

    def target(t) -> int:
        if isinstance(t, Nominal):
            if t.name not in m.nominals:
                raise ModelError(f"uninterpreted nominal {t.name!r}")
            return m.nominals[t.name]
        if t.name not in g:
            raise ModelError(f"uninterpreted state variable {t.name!r}")
        return g[t.name]

    def ev(node: Formula) -> int:
        key = (node, tuple(sorted(g.items())))
        hit = memo.get(key)
        if hit is not None:
            return hit
        t = type(node)
        if t is Top:
            r = full
        elif t is Bottom:
            r = 0
        elif t is Prop:
            if node.name not in m.props:
                raise ModelError(f"uninterpreted proposition {node.name!r}")
            r = _prop_mask(m.props[node.name])
        elif t is Nominal or t is SVar:
            r = 1 << target(node)
        elif t is Neg:
            r = full & ~ev(node.body)
        elif t is And:
            r = ev(node.left)
            if r:
                r &= ev(node.right)
        elif t is Or:
            r = ev(node.left) | ev(node.right)
        elif t is Diamond:
            r = _diamond(ev(node.body))
        elif t is Box:
            r = _box(ev(node.body), full)
        elif t is At:
            r = full if ev(node.body) >> target(node.target) & 1 else 0
        elif t is Down:
            old = g.get(node.var)
            r = 0
            for w in range(m.size):
                g[node.var] = w
                if ev(node.body) >> w & 1:
                    r |= 1 << w
            if old is None:
                del g[node.var]
            else:
                g[node.var] = old
        else:
            raise TypeError(f"not a formula: {node!r}")
        memo[key] = r
        return r

    return ev(f)


def check_finite(m: FiniteLinearModel, w: int, f: Formula,
                 g: Optional[Mapping[str, int]] = None) -> bool:
    if not 0 <= w < m.size:
        raise ModelError(f"state {w} outside a model of size {m.size}")
    return bool(extension(m, f, g) >> w & 1)


def _atoms_of(f: Formula):
    noms, props = set(), set()
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, Nominal):
            noms.add(node.name)
        elif isinstance(node, Prop):
            props.add(node.name)
        elif isinstance(node, At) and isinstance(node.target, Nominal):
            noms.add(node.target.name)
        stack.extend(node.children())
    return sorted(noms), sorted(props)


def sat_search_finite(f: Formula, max_states: int) -> Optional[tuple[FiniteLinearModel, int]]:
    """Smallest finite linear model (and state) satisfying ``f``, if any
    has at most ``max_states`` states.  ``None`` says nothing about
    infinite models."""
    noms, props = _atoms_of(f)
    svars = sorted(analyze(f).free_svars)
    for n in range(1, max_states + 1):
        subsets = range(1 << n)
        for nv in itertools.product(range(n), repeat=len(noms)):
            for sv in itertools.product(range(n), repeat=len(svars)):
                for pv in itertools.product(subsets, repeat=len(props)):
                    pmap = {p: frozenset(s for s in range(n) if mask >> s & 1)
                            for p, mask in zip(props, pv)}
                    m = FiniteLinearModel(n, dict(zip(noms, nv)), dict(zip(svars, sv)), pmap)
                    ext = extension(m, f)
                    if ext:
                        return m, (ext & -ext).bit_length() - 1
    return None


# ---------------------------------------------------------------------------
# quotient by m-inseparability

@dataclass(frozen=True)
class QuotientResult:
    model: FiniteLinearModel
    class_map: tuple[int, ...]
    class_sizes: tuple[int, ...]
    delta: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "model": model_to_json(self.model),
            "class_map": list(self.class_map),
            "class_sizes": list(self.class_sizes),
            "delta": list(self.delta),
        }


def quotient(m: FiniteLinearModel, md: int) -> QuotientResult:
    """Collapse states that no formula of modal depth ``<= md`` can tell apart.

    ``delta[w]`` counts the states strictly between ``w`` and the next
    nominal state after it, or the end of the model if none follows.  Two
    distinct states merge when neither is nominal, they lie in the same gap
    between nominal states, and both have ``delta > md``.
    """
    if m.svars:
        raise ModelError("quotient needs a model without state variables")
    if m.props:
        raise ModelError("quotient needs a model without propositions")
    named = m.nominal_states()
    n = m.size
    delta = [0] * n
    nxt = n  # next nominal state at or after the current position, or the end
    for w in range(n - 1, -1, -1):
        delta[w] = nxt - w - 1
        if w in named:
            nxt = w
    class_map = []
    sizes: list[int] = []
    prev_mergeable = False
    for w in range(n):
        mergeable = w not in named and delta[w] > md
        if mergeable and prev_mergeable:
            sizes[-1] += 1
        else:
            sizes.append(1)
        class_map.append(len(sizes) - 1)
        prev_mergeable = mergeable
    noms = {name: class_map[s] for name, s in m.nominals.items()}
    return QuotientResult(FiniteLinearModel(len(sizes), noms), tuple(class_map),
                          tuple(sizes), tuple(delta))


# ---------------------------------------------------------------------------
# segmented models

@dataclass(frozen=True)
class Point:
    nominals: frozenset = frozenset()


@dataclass(frozen=True)
class Dense:
    """An open interval isomorphic to the rationals, carrying no nominal."""


Segment = Union[Point, Dense]


@dataclass(frozen=True)
class SegmentedLinearModel:
    segments: tuple

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise ModelError("a segmented model needs at least one segment")
        seen = set()
        for k, s in enumerate(segs):
            if isinstance(s, Point):
                object.__setattr__(s, "nominals", frozenset(s.nominals))
                dup = seen & s.nominals
                if dup:
                    raise ModelError(f"nominal {sorted(dup)[0]!r} names two points")
                seen |= s.nominals
            elif isinstance(s, Dense):
                if k and isinstance(segs[k - 1], Dense):
                    raise ModelError("adjacent dense blocks must be merged")
            else:
                raise ModelError(f"not a segment: {s!r}")

    @property
    def has_dense(self) -> bool:
        return any(isinstance(s, Dense) for s in self.segments)

    def nominal_index(self) -> dict[str, int]:
        return {name: k for k, s in enumerate(self.segments) if isinstance(s, Point)
                for name in s.nominals}

    def to_finite(self) -> FiniteLinearModel:
        if self.has_dense:
            raise ModelError("model has a dense block")
        return FiniteLinearModel(len(self.segments), self.nominal_index())


def segmented_extension(m: SegmentedLinearModel, f: Formula) -> int:
    """Bitmask over segment indices; a dense block is judged by any one of
    its (indistinguishable) points."""
    segs = m.segments
    n = len(segs)
    full = (1 << n) - 1
    dense = _prop_mask(k for k, s in enumerate(segs) if isinstance(s, Dense))
    where = m.nominal_index()
    memo: dict = {}

    def nominal(name) -> int:
        if name not in where:
            raise ModelError(f"uninterpreted nominal {name!r}")
        return where[name]

    def ev(node):
        hit = memo.get(node)
        if hit is not None:
            return hit
        t = type(node)
        if t is Top:
            r = full
        elif t is Bottom:
            r = 0
        elif t is Nominal:
            r = 1 << nominal(node.name)
        elif t is Neg:
            r = full & ~ev(node.body)
        elif t is And:
            r = ev(node.left) & ev(node.right)
        elif t is Or:
            r = ev(node.left) | ev(node.right)
        elif t is Diamond:
            b = ev(node.body)
            r = _diamond(b) | (b & dense)
        elif t is Box:
            b = ev(node.body)
            # later segments all good, and for blocks the block itself too
            r = _box(b, full) & (b | ~dense)
        elif t is At:
            tgt = node.target
            if not isinstance(tgt, Nominal):
                raise ModelError("segmented models do not interpret state variables")
            r = full if ev(node.body) >> nominal(tgt.name) & 1 else 0
        elif t in (SVar, Down):
            raise ModelError("segmented models do not interpret state variables")
        elif t is Prop:
            raise ModelError(f"uninterpreted proposition {node.name!r}")
        else:
            raise TypeError(f"not a formula: {node!r}")
        memo[node] = r
        return r

    return ev(f) & full


def check_segmented(m: SegmentedLinearModel, e: int, f: Formula) -> bool:
    if not 0 <= e < len(m.segments):
        raise ModelError(f"segment {e} outside the model")
    return bool(segmented_extension(m, f) >> e & 1)


# ---------------------------------------------------------------------------
# JSON

def model_to_json(m) -> dict:
    if isinstance(m, FiniteLinearModel):
        out = {"kind": "finite", "states": m.size,
               "nominals": dict(sorted(m.nominals.items())),
               "svars": dict(sorted(m.svars.items()))}
        if m.props:
            out["props"] = {p: sorted(s) for p, s in sorted(m.props.items())}
        return out
    if isinstance(m, SegmentedLinearModel):
        segs = []
        for s in m.segments:
            if isinstance(s, Dense):
                segs.append({"type": "dense"})
            else:
                segs.append({"type": "point", "nominals": sorted(s.nominals)})
        return {"kind": "segmented", "segments": segs}
    raise TypeError(f"not a model: {m!r}")


def model_from_json(data) -> Union[FiniteLinearModel, SegmentedLinearModel]:
    if not isinstance(data, dict):
        raise ModelError("model must be a JSON object")
    kind = data.get("kind")
    try:
        if kind == "finite":
            states = data["states"]
            if not isinstance(states, int) or isinstance(states, bool):
                raise ModelError("'states' must be an integer")
            noms = dict(data.get("nominals", {}))
            svars = dict(data.get("svars", {}))
            props = {p: frozenset(v) for p, v in dict(data.get("props", {})).items()}
            return FiniteLinearModel(states, noms, svars, props)
        if kind == "segmented":
            segs = []
            for s in data["segments"]:
                if s.get("type") == "dense":
                    segs.append(Dense())
                elif s.get("type") == "point":
                    segs.append(Point(frozenset(s.get("nominals", []))))
                else:
                    raise ModelError(f"unknown segment type {s.get('type')!r}")
            return SegmentedLinearModel(tuple(segs))
    except (KeyError, TypeError, AttributeError) as exc:
        raise ModelError(f"malformed model: {exc}") from exc
    raise ModelError(f"unknown model kind {kind!r}")
