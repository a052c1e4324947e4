import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from hylosat import fol
from hylosat.fol import (
    FALSE, TRUE, DifferenceSystem, Eq, Exists, FolAnd, FolNot, FolOr, FolParseError,
    Forall, Less, ResourceLimit, close_sentence, decide_at, eval_bounded, eval_graded,
    fol_free_vars, fol_to_text, parse_fol, qe_decide, translate_H,
)
from hylosat.formula import And, At, Bottom, Box, Down, SVar, Top, parse
from hylosat.generate import alphabet, formulas, random_sentence


def test_translation_examples():
    assert translate_H(parse("$x")) == Eq("x", "z")
    assert translate_H(parse("<> $x")) == Exists("t", FolAnd(Less("z", "t"), Eq("x", "t")))
    assert translate_H(parse("down x. $x")) == Exists("x", FolAnd(Eq("x", "z"), Eq("x", "z")))
    assert fol_to_text(translate_H(parse("[] $x"))) == "forall t. ((t < z | t = z) | x = t)"
    assert translate_H(parse("@$x #i")) == Eq("i", "x")


def test_translation_rejects_clashing_point_variable():
    with pytest.raises(ValueError):
        translate_H(parse("$z"))
    assert translate_H(parse("$z"), "w") == Eq("z", "w")


def test_nominal_renamed_when_shared_with_state_variable():
    assert fol_to_text(translate_H(parse("#y & $y"))) == "(n_y = z & y = z)"


def test_close_sentence_examples():
    s = close_sentence(parse("$x"))
    assert s == Exists("x", FolOr(Eq("x", 0), Exists("t", FolAnd(Less(0, "t"), Eq("x", "t")))))
    s = close_sentence(parse("true"))
    assert not fol_free_vars(s) and qe_decide(s)
    assert not isinstance(close_sentence(parse("<> true")), Exists)


def test_qe_examples():
    assert qe_decide(parse_fol("exists x. 0 < x & x < 2"))
    assert not qe_decide(parse_fol("exists x. x < 0"))
    assert qe_decide(parse_fol("forall x. exists y. x < y"))
    assert not qe_decide(parse_fol("exists x. forall y. y < x | y = x"))
    assert qe_decide(parse_fol("forall x. 0 < x | x = 0"))
    assert not qe_decide(parse_fol("exists x. exists y. x < y & y < x"))
    assert qe_decide(parse_fol("exists x. exists y. x < y & 3 < x"))


def test_qe_rejects_open_formulas():
    with pytest.raises(ValueError):
        qe_decide(parse_fol("x < 1"))


def test_bounded_examples():
    s = parse_fol("forall x. exists y. x < y")
    assert not eval_bounded(s, 3)
    assert eval_graded(s)
    assert eval_bounded(parse_fol("exists x. 0 < x & x < 2"), 5)
    for b in range(4):
        assert not eval_bounded(FALSE, b)


def test_resource_limit():
    s = parse_fol("forall a. exists b. forall c. exists d. (a < b & b < c) | (c < d & d < a) | a = d")
    with pytest.raises(ResourceLimit):
        qe_decide(s, limit=2)
    assert qe_decide(s) == eval_graded(s)


def test_qe_limit_from_environment(monkeypatch):
    monkeypatch.setenv("HYLOSAT_QE_LIMIT", "2")
    s = parse_fol("forall a. exists b. forall c. exists d. (a < b & b < c) | (c < d & d < a) | a = d")
    with pytest.raises(ResourceLimit):
        qe_decide(s)


def test_parse_errors():
    for text in ["", "exists . x < 1", "x <", "P(x", "x ! y", "forall true. x < 1", "x < 1 )"]:
        with pytest.raises(FolParseError):
            parse_fol(text)


def test_parse_predicates_and_constants():
    f = parse_fol("forall x. P(x) | true")
    assert f == Forall("x", FolOr(fol.Pred("P", "x"), TRUE))
    assert fol_free_vars(parse_fol("exists x. x < y")) == {"y"}


@given(st.integers(0, 10_000))
@settings(max_examples=200, deadline=None)
def test_round_trip_random_sentences(seed):
    s = random_sentence(random.Random(seed))
    assert parse_fol(fol_to_text(s)) == s


def _derived_eq(f):
    t = type(f)
    if t is Eq:
        return FolNot(FolOr(Less(f.left, f.right), Less(f.right, f.left)))
    if t is FolNot:
        return FolNot(_derived_eq(f.body))
    if t in (FolAnd, FolOr):
        return t(_derived_eq(f.left), _derived_eq(f.right))
    if t in (Exists, Forall):
        return t(f.var, _derived_eq(f.body))
    return f


def test_qe_against_graded_oracle_and_negation():
    rng = random.Random(2024)
    for _ in range(300):
        s = random_sentence(rng)
        truth = qe_decide(s)
        assert truth == eval_graded(s)
        assert qe_decide(FolNot(s)) != truth
        assert qe_decide(_derived_eq(s)) == truth


def test_difference_system_basics():
    d = DifferenceSystem([("x", "y", -1), ("y", "", 2)])  # x < y <= 2
    assert d.feasible()
    assert d.holds({"x": 0, "y": 2}) and not d.holds({"x": 2, "y": 2})
    p = d.project("y")
    assert p.variables == {"x"}
    assert [v for v in range(6) if p.holds({"x": v})] == [0, 1]
    assert not DifferenceSystem([("x", "y", -1), ("y", "x", -1)]).feasible()
    assert not DifferenceSystem([("x", "", -1)]).feasible()  # x <= -1 over naturals


def test_decide_at_examples():
    assert decide_at(parse("$x"), {"x": 0}, 0)
    assert decide_at(parse("<> true"), {}, 0)
    assert not decide_at(parse("[] $x"), {"x": 3}, 7)
    assert decide_at(parse("@#i <> #j"), {}, 5, {"i": 1, "j": 4})
    with pytest.raises(KeyError):
        decide_at(parse("$x"), {}, 0)


def _nat_eval(f, g, i):
    """(box, down, @) truth over N: beyond every value in play all states are
    alike, so a box only needs checking up to one past that maximum."""
    t = type(f)
    if t is SVar:
        return g[f.name] == i
    if t is Box:
        top = max([i, *g.values()]) + 1
        return all(_nat_eval(f.body, g, j) for j in range(i + 1, top + 1))
    if t is Down:
        return _nat_eval(f.body, {**g, f.var: i}, i)
    if t is At:
        return _nat_eval(f.body, g, g[f.target.name])
    if t is Top or t is Bottom:
        return t is Top
    left, right = _nat_eval(f.left, g, i), _nat_eval(f.right, g, i)
    return left and right if t is And else left or right


def test_decide_at_matches_direct_evaluation():
    alpha = alphabet("bva", svars="xy")
    fs = list(formulas(alpha, 4))
    rng = random.Random(4)
    for f in rng.sample(fs, 300):
        for gx, gy, n in itertools.product(range(3), repeat=3):
            g = {"x": gx, "y": gy}
            assert decide_at(f, g, n) == _nat_eval(f, g, n), (f, g, n)
