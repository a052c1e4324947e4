"""Satisfiability procedures for monotone hybrid logic over (N, <) and over
linear orders, plus the routing between them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Optional

from . import fol, smallmodel
from .formula import (
    BOTTOM, TOP, And, At, Bottom, Box, Diamond, Down, Formula, Nominal, Op, Or, Prop, SVar,
    Top, OccurrenceClass, analyze, classify_occurrence, index, normalize_monotone,
    rename_apart,
)
from .kripke import (
    FiniteLinearModel, ModelError, SegmentedLinearModel, check_finite, check_segmented,
    model_from_json, model_to_json, sat_search_finite,
)
from .reductions import _eliminate_down_with_table, _skolemize_with_table

__all__ = [
    "Verdict", "FragmentError", "UnsupportedRoute", "ROUTES", "n_g", "route", "decide",
    "decide_one_state", "decide_lin_box_free", "decide_nat_box_at", "decide_nat_box_down",
    "bool_transform", "streaming_residue", "decide_nat_logspace", "decide_nat_qe",
    "decide_np_nat", "decide_np_lin", "eval_residue", "verify", "canonical_assignment",
]

ROUTES = (
    "one-state", "lin-box-free", "nat-box-at", "nat-box-down", "nat-logspace",
    "np-small-model", "nat-qe", "unsupported-nonelementary",
)
FULL = frozenset(Op)


class FragmentError(ValueError):
    """Input outside the fragment a procedure handles (or not monotone)."""


class UnsupportedRoute(ValueError):
    def __init__(self, route: str, message: str):
        super().__init__(message)
        self.route = route


@dataclass
class Verdict:
    verdict: str  # "sat", "unsat" or "unknown"
    route: str
    frame: str
    witness: Optional[dict] = None
    residue: Optional[Formula] = field(default=None, compare=False, repr=False)

    @property
    def satisfiable(self) -> Optional[bool]:
        return None if self.verdict == "unknown" else self.verdict == "sat"

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "route": self.route, "frame": self.frame}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def _verdict(ok: bool, route: str, frame: str, witness=None, residue=None) -> Verdict:
    return Verdict("sat" if ok else "unsat", route, frame, witness if ok else None, residue)


def n_g(g: Mapping[str, int]) -> int:
    """One past the largest assigned state; 0 for the empty assignment."""
    return max(g.values()) + 1 if g else 0


def canonical_assignment(f: Formula) -> dict[str, int]:
    """Every free state variable of ``f`` mapped to 0."""
    return {x: 0 for x in sorted(analyze(f).free_svars)}


def _require_monotone(f: Formula):
    if not analyze(f).signature.monotone:
        raise FragmentError("formula contains negation; only monotone formulas are decided")


def _ops(f: Formula) -> frozenset:
    return analyze(f).signature.operators


def _atoms(f: Formula):
    noms, svars = set(), set()
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, Nominal):
            noms.add(node.name)
        elif isinstance(node, At):
            (noms if isinstance(node.target, Nominal) else svars).add(node.target.name)
        elif isinstance(node, SVar):
            svars.add(node.name)
        stack.extend(node.children())
    return noms, svars


def eval_residue(r: Formula) -> bool:
    t = type(r)
    if t is Top:
        return True
    if t is Bottom:
        return False
    if t is And:
        return eval_residue(r.left) and eval_residue(r.right)
    if t is Or:
        return eval_residue(r.left) or eval_residue(r.right)
    raise TypeError(f"not a Boolean residue: {r!r}")


def _nat_witness(f: Formula, state: int = 0, g=None, eta=None) -> dict:
    noms, _ = _atoms(f)
    g = canonical_assignment(f) if g is None else g
    eta = {i: 0 for i in sorted(noms)} if eta is None else eta
    return {"assignment": dict(sorted(g.items())), "valuation": dict(sorted(eta.items())),
            "state": state, "model": {"kind": "nat"}}


# ---------------------------------------------------------------------------
# routing

def route(f: Formula, frame: str) -> str:
    _require_monotone(f)
    if frame not in ("nat", "lin"):
        raise ValueError(f"unknown frame {frame!r}")
    ops = _ops(f)
    if ops <= {Op.DOWN, Op.AT}:
        return "one-state"
    if Op.DIAMOND not in ops:
        if frame == "lin":
            return "lin-box-free"
        if ops == {Op.BOX, Op.AT}:
            return "nat-box-at"
        if ops == {Op.BOX, Op.DOWN}:
            return "nat-box-down"
        return "nat-logspace"
    if ops != FULL:
        return "np-small-model"
    return "nat-qe" if frame == "nat" else "unsupported-nonelementary"


def _applicable(name: str, ops: frozenset, frame: str) -> bool:
    if name == "one-state":
        return ops <= {Op.DOWN, Op.AT}
    if name == "lin-box-free":
        return frame == "lin" and Op.DIAMOND not in ops
    if name == "nat-box-at":
        return frame == "nat" and ops <= {Op.BOX, Op.AT}
    if name == "nat-box-down":
        return frame == "nat" and ops <= {Op.BOX, Op.DOWN}
    if name == "nat-logspace":
        return frame == "nat" and Op.DIAMOND not in ops
    if name == "np-small-model":
        return not (Op.DOWN in ops and Op.BOX in ops and Op.AT in ops)
    if name == "nat-qe":
        return frame == "nat"
    return False


def decide(f: Formula, frame: str, route_name: str = "auto", fallback_states: int = 0,
           witness: bool = True) -> Verdict:
    """Decide ``f`` over ``frame`` through the matching procedure.

    A full-operator formula over linear orders raises
    :class:`UnsupportedRoute` unless ``fallback_states`` is positive, in
    which case a finite model search up to that size may report "sat" (a
    finite linear model is a linear model) and otherwise "unknown".
    """
    auto = route(f, frame)
    name = auto if route_name in (None, "auto") else route_name
    if name not in ROUTES:
        raise ValueError(f"unknown route {name!r}")
    if name == "unsupported-nonelementary" or not _applicable(name, _ops(f), frame):
        if name == "unsupported-nonelementary" and fallback_states > 0:
            return _finite_fallback(f, fallback_states)
        raise UnsupportedRoute(name, f"route {name!r} does not handle this formula over {frame}")
    if name == "one-state":
        return decide_one_state(f, frame)
    if name == "lin-box-free":
        return decide_lin_box_free(f)
    if name == "nat-box-at":
        return decide_nat_box_at(f)
    if name == "nat-box-down":
        return decide_nat_box_down(f)
    if name == "nat-logspace":
        return decide_nat_logspace(f)
    if name == "nat-qe":
        return decide_nat_qe(f, witness=witness)
    return decide_np_nat(f) if frame == "nat" else decide_np_lin(f)


def _finite_fallback(f: Formula, max_states: int) -> Verdict:
    g = normalize_monotone(f, binder_mode=False)
    found = sat_search_finite(g, max_states)
    if found is None:
        return Verdict("unknown", "unsupported-nonelementary", "lin")
    m, w = found
    wit = {"assignment": dict(sorted(m.svars.items())), "valuation": dict(sorted(m.nominals.items())),
           "state": w, "model": model_to_json(m)}
    return Verdict("sat", "unsupported-nonelementary", "lin", wit)


# ---------------------------------------------------------------------------
# fragments without diamond

def _strip(f: Formula, atom_value) -> Formula:
    """Drop modal and hybrid operators, replacing atoms via ``atom_value``
    (called with the node id)."""
    idx = index(f)
    nodes = idx.nodes
    # rebuild bottom-up over the preorder numbering
    built: dict[int, Formula] = {}
    kids: dict[int, list[int]] = {}
    for k in range(1, len(nodes)):
        kids.setdefault(idx.parent[k], []).append(k)
    for k in range(len(nodes) - 1, -1, -1):
        node = nodes[k]
        t = type(node)
        if t in (Prop, Nominal, SVar):
            built[k] = atom_value(k)
        elif t in (Top, Bottom):
            built[k] = node
        elif t in (And, Or):
            a, b = kids[k]
            built[k] = t(built[a], built[b])
        elif t in (Diamond, Box, Down, At):
            built[k] = built[kids[k][0]]
        else:
            raise FragmentError(f"unexpected {t.__name__}")
    return built[0]


def _one_state_model(f: Formula) -> dict:
    noms, svars = _atoms(f)
    g = {x: 0 for x in sorted(svars)}
    eta = {i: 0 for i in sorted(noms)}
    m = FiniteLinearModel(1, eta, g)
    return {"assignment": g, "valuation": eta, "state": 0, "model": model_to_json(m)}


def decide_one_state(f: Formula, frame: str = "lin") -> Verdict:
    _require_monotone(f)
    if not _ops(f) <= {Op.DOWN, Op.AT}:
        raise FragmentError("one-state procedure needs a formula over down and @ only")
    residue = _strip(f, lambda k: TOP)
    return _verdict(eval_residue(residue), "one-state", frame, _one_state_model(f), residue)


def _replace_boxes(f: Formula) -> Formula:
    t = type(f)
    if t is Box:
        return TOP
    if t in (And, Or):
        return t(_replace_boxes(f.left), _replace_boxes(f.right))
    if t is Down:
        return Down(f.var, _replace_boxes(f.body))
    if t is At:
        return At(f.target, _replace_boxes(f.body))
    if t is Diamond:
        raise FragmentError("diamond present")
    return f


def decide_lin_box_free(f: Formula) -> Verdict:
    _require_monotone(f)
    if Op.DIAMOND in _ops(f):
        raise FragmentError("box-only procedure over linear orders needs a diamond-free formula")
    g = _replace_boxes(f)
    residue = _strip(g, lambda k: TOP)
    return _verdict(eval_residue(residue), "lin-box-free", "lin", _one_state_model(f), residue)


def _classify_strip(f: Formula, route_name: str) -> Verdict:
    idx = index(f)

    def value(k):
        if isinstance(idx.nodes[k], Prop):
            return TOP
        cls = classify_occurrence(f, k, idx)
        return BOTTOM if cls is OccurrenceClass.BOUND_BY_BOX else TOP

    residue = _strip(f, value)
    return _verdict(eval_residue(residue), route_name, "nat", _nat_witness(f), residue)


def decide_nat_box_at(f: Formula) -> Verdict:
    _require_monotone(f)
    if not _ops(f) <= {Op.BOX, Op.AT}:
        raise FragmentError("needs a formula over box and @ only")
    return _classify_strip(f, "nat-box-at")


def decide_nat_box_down(f: Formula) -> Verdict:
    _require_monotone(f)
    if not _ops(f) <= {Op.BOX, Op.DOWN}:
        raise FragmentError("needs a formula over box and down only")
    return _classify_strip(f, "nat-box-down")


def _prepare_nat(f: Formula) -> Formula:
    _require_monotone(f)
    if Op.DIAMOND in _ops(f):
        raise FragmentError("needs a diamond-free formula")
    return rename_apart(normalize_monotone(f, binder_mode=True))


def bool_transform(f: Formula) -> Formula:
    """Boolean residue obtained by following the state of evaluation from
    the canonical assignment at state 0.  A box moves to ``n_g``, a binder
    records the current state, @ jumps to the recorded state."""
    f = _prepare_nat(f)

    def go(node, g, i):
        t = type(node)
        if t is SVar:
            return TOP if g[node.name] == i else BOTTOM
        if t in (Top, Bottom):
            return node
        if t in (And, Or):
            return t(go(node.left, g, i), go(node.right, g, i))
        if t is Box:
            return go(node.body, g, n_g(g))
        if t is Down:
            return go(node.body, {**g, node.var: i}, i)
        if t is At:
            return go(node.body, g, g[node.target.name])
        raise FragmentError(f"unexpected {t.__name__}")

    return go(f, canonical_assignment(f), 0)


def streaming_residue(f: Formula) -> Formula:
    """Same residue as :func:`bool_transform`, produced by one left-to-right
    pass; each variable occurrence is resolved by walking parent links and
    comparing binders, with no assignment kept."""
    f = _prepare_nat(f)
    idx = index(f)
    nodes, parent = idx.nodes, idx.parent

    def binder(k: int, name: str) -> int:
        # nearest strict ancestor binding name; -1 stands for the root's
        # implicit binding of free variables to state 0
        k = parent[k]
        while k >= 0:
            node = nodes[k]
            if type(node) is Down and node.var == name:
                return k
            k = parent[k]
        return -1

    def same_state(alpha: int, beta: int) -> bool:
        # alpha is -1 or an ancestor of beta
        while True:
            r = parent[beta]
            jump = -1
            while r >= 0 and r >= alpha:
                if type(nodes[r]) in (Box, At):
                    jump = r
                    break
                r = parent[r]
            if jump < 0:
                return True
            if type(nodes[jump]) is Box:
                return False
            gamma = binder(jump, nodes[jump].target.name)
            if gamma == alpha:
                return True
            alpha, beta = min(alpha, gamma), max(alpha, gamma)

    tokens: list = []
    for k, node in enumerate(nodes):
        t = type(node)
        if t in (And, Or, Top, Bottom):
            tokens.append(node if t in (Top, Bottom) else t)
        elif t is SVar:
            tokens.append(TOP if same_state(binder(k, node.name), k) else BOTTOM)
    stack: list[Formula] = []
    for tok in reversed(tokens):
        if tok is And or tok is Or:
            left = stack.pop()
            right = stack.pop()
            stack.append(tok(left, right))
        else:
            stack.append(tok)
    return stack[0]


def decide_nat_logspace(f: Formula) -> Verdict:
    residue = streaming_residue(f)
    return _verdict(eval_residue(residue), "nat-logspace", "nat", _nat_witness(f), residue)


# ---------------------------------------------------------------------------
# quantifier elimination

def decide_nat_qe(f: Formula, witness: bool = True, limit: Optional[int] = None) -> Verdict:
    _require_monotone(f)
    body, closing, noms = fol.sentence_parts(f)
    sentence = body
    for v in reversed(closing):
        sentence = fol.Exists(v, sentence)
    try:
        ok = fol.qe_decide(sentence, limit)
        if not ok or not witness:
            return _verdict(ok, "nat-qe", "nat")
        values: dict[str, int] = {}
        for k, v in enumerate(closing):
            for val in itertools.count():
                trial = fol.substitute(body, {**values, v: val})
                for rest in reversed(closing[k + 1:]):
                    trial = fol.Exists(rest, trial)
                if fol.qe_decide(trial, limit):
                    values[v] = val
                    break
        back = {var: name for name, var in noms.items()}
        eta = {back[v]: values[v] for v in closing if v in back}
        g = {v: values[v] for v in closing if v not in back}
        state = next(n for n in itertools.count() if fol.decide_at(f, g, n, eta, limit))
    except fol.ResourceLimit:
        return Verdict("unknown", "nat-qe", "nat")
    return _verdict(True, "nat-qe", "nat", _nat_witness(f, state, g, eta))


# ---------------------------------------------------------------------------
# small-model search

def _svars_to_nominals(f: Formula) -> tuple[Formula, dict[str, str]]:
    noms, svars = _atoms(f)
    table = {}
    for v in sorted(svars):
        name = v
        k = 0
        while name in noms or name in table.values():
            k += 1
            name = f"{v}{k}"
        table[v] = name

    def go(node):
        t = type(node)
        if t is SVar:
            return Nominal(table[node.name])
        if t is At:
            tgt = node.target
            if isinstance(tgt, SVar):
                tgt = Nominal(table[tgt.name])
            return At(tgt, go(node.body))
        if t in (And, Or):
            return t(go(node.left), go(node.right))
        if t in (Diamond, Box):
            return t(go(node.body))
        return node

    return go(f), table


def _np_prepare(f: Formula) -> tuple[Formula, dict[str, str]]:
    """Binder-free equivalent (for satisfiability) over nominals, and the
    nominal standing for each free state variable."""
    _require_monotone(f)
    ops = _ops(f)
    if Op.DOWN in ops and Op.BOX in ops and Op.AT in ops:
        raise FragmentError("small-model search does not cover box, down and @ together")
    f = normalize_monotone(f, binder_mode=False)
    if Op.DOWN in ops:
        if Op.BOX not in ops:
            return _skolemize_with_table(f)
        return _eliminate_down_with_table(f)
    return _svars_to_nominals(f)


def _np(f: Formula, frame: str) -> Verdict:
    prepared, table = _np_prepare(f)
    found = smallmodel.search(prepared, frame)
    if found is None:
        return _verdict(False, "np-small-model", frame)
    model = found.model
    # over N the points are the states 0, 1, ... and the trailing block
    # starts the tail, so segment indices double as state numbers
    where = model.nominal_index()
    state = found.state
    g = {v: where[n] for v, n in table.items()}
    noms, _ = _atoms(f)
    eta = {name: where[name] for name in sorted(noms)}
    wit = {"assignment": dict(sorted(g.items())), "valuation": eta, "state": state,
           "model": model_to_json(model)}
    return _verdict(True, "np-small-model", frame, wit)


def decide_np_nat(f: Formula) -> Verdict:
    return _np(f, "nat")


def decide_np_lin(f: Formula) -> Verdict:
    return _np(f, "lin")


# ---------------------------------------------------------------------------
# witness checking

def verify(f: Formula, v: Verdict, limit: Optional[int] = None) -> bool:
    """Re-check a "sat" verdict's witness with the checker for its frame.
    Verdicts without a witness pass trivially."""
    if v.verdict != "sat" or not v.witness:
        return True
    w = v.witness
    g = dict(w.get("assignment", {}))
    eta = dict(w.get("valuation", {}))
    model = w.get("model", {})
    plain = normalize_monotone(f, binder_mode=False)
    if v.frame == "nat":
        if model.get("kind") == "segmented":
            prepared, _ = _np_prepare(f)
            if not check_segmented(model_from_json(model), w["state"], prepared):
                return False
        return fol.decide_at(plain, g, w["state"], eta, limit)
    m = model_from_json(model)
    if isinstance(m, FiniteLinearModel):
        m = FiniteLinearModel(m.size, {**m.nominals, **eta}, {**m.svars, **g})
        return check_finite(m, w["state"], plain)
    if isinstance(m, SegmentedLinearModel):
        if not m.has_dense:
            fin = m.to_finite()
            fin = FiniteLinearModel(fin.size, {**fin.nominals, **eta}, g)
            try:
                return check_finite(fin, w["state"], plain)
            except ModelError:
                pass
        prepared, _ = _np_prepare(f)
        return check_segmented(m, w["state"], prepared)
    return False
