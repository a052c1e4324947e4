import itertools
import random

import pytest

from hylosat.deciders import (
    FragmentError, UnsupportedRoute, Verdict, bool_transform, canonical_assignment, decide,
    decide_lin_box_free, decide_nat_box_at, decide_nat_box_down, decide_nat_logspace,
    decide_nat_qe, decide_np_lin, decide_np_nat, decide_one_state, eval_residue, n_g, route,
    streaming_residue, verify,
)
from hylosat.fol import decide_at
from hylosat.formula import BOTTOM, TOP, Op, Or, Prop, analyze, normalize_monotone, parse
from hylosat.generate import alphabet, formulas, random_formula
from hylosat.kripke import Dense, model_from_json

P = parse
PHI_D = P("#i & <> <> #j & [] (#j | <> <> #j)")


def test_n_g():
    assert n_g({}) == 0
    assert n_g({"x": 0}) == 1
    assert n_g({"x": 3, "y": 1}) == 4
    assert canonical_assignment(P("$y & down x. @$z $x")) == {"y": 0, "z": 0}


@pytest.mark.parametrize("text, frame, expected", [
    ("down x. @$x $x", "lin", "one-state"),
    ("[] false", "nat", "nat-logspace"),
    ("[] false", "lin", "lin-box-free"),
    ("down x. <> [] @$x $x", "lin", "unsupported-nonelementary"),
    ("down x. <> [] @$x $x", "nat", "nat-qe"),
    ("[] @#i #j", "nat", "nat-box-at"),
    ("down x. [] $x", "nat", "nat-box-down"),
    ("down x. [] @$x $x", "nat", "nat-logspace"),
    ("<> #i", "nat", "np-small-model"),
    ("<> [] down x. $x", "lin", "np-small-model"),
    ("true", "nat", "one-state"),
])
def test_route_table(text, frame, expected):
    assert route(P(text), frame) == expected


def test_route_depends_only_on_operators():
    alpha = alphabet("dbva", svars="x", nominals="i")
    seen = {}
    for f in formulas(alpha, 5):
        ops = analyze(f).signature.operators
        for frame in ("nat", "lin"):
            r = route(f, frame)
            assert seen.setdefault((ops, frame), r) == r


def test_route_rejects_negation():
    with pytest.raises(FragmentError):
        route(P("!p"), "nat")
    with pytest.raises(FragmentError):
        decide(P("<> !#i"), "lin")


def test_one_state_examples():
    assert decide_one_state(P("down x. @$x $x")).verdict == "sat"
    v = decide_one_state(P("$x & $y"))
    assert v.satisfiable and v.witness["assignment"] == {"x": 0, "y": 0}
    assert decide_one_state(P("true & false")).verdict == "unsat"
    with pytest.raises(FragmentError):
        decide_one_state(P("<> true"))


def test_lin_box_free_examples():
    assert decide_lin_box_free(P("[] false")).satisfiable
    assert decide_lin_box_free(P("[] false & down x. $x")).satisfiable
    assert not decide_lin_box_free(P("false")).satisfiable
    assert not decide_lin_box_free(P("down x. [] false & @$x false")).satisfiable


def test_nat_box_at_examples():
    assert decide_nat_box_at(P("[] false")).verdict == "unsat"
    assert decide_nat_box_at(P("[] #i")).verdict == "unsat"
    assert decide_nat_box_at(P("#i & @#i #j")).verdict == "sat"
    assert decide_nat_qe(P("#i & @#i #j")).verdict == "sat"


def test_nat_box_down_examples():
    assert decide_nat_box_down(P("down x. [] $x")).verdict == "unsat"
    assert decide_nat_box_down(P("down x. $x")).verdict == "sat"
    assert decide_nat_box_down(P("down x. ($x & [] down y. $y)")).verdict == "sat"
    for text in ("down x. [] $x", "down x. ($x & [] down y. $y)"):
        assert decide_nat_qe(P(text)).verdict == decide_nat_box_down(P(text)).verdict


def test_residue_examples():
    assert streaming_residue(P("down x. $x")) == TOP
    assert streaming_residue(P("down x. [] $x")) == BOTTOM
    assert streaming_residue(P("down x. [] down y. @$y $x")) == BOTTOM
    assert bool_transform(P("down x. [] down y. @$y $x")) == BOTTOM
    r = streaming_residue(P("down x. ($x | [] $x)"))
    assert r == Or(TOP, BOTTOM) == bool_transform(P("down x. ($x | [] $x)"))
    assert decide_nat_logspace(P("down x. ($x | [] $x)")).verdict == "sat"
    assert decide_nat_logspace(P("[] false")).residue == BOTTOM


def test_streaming_matches_recursion_residues():
    alpha = alphabet("bva", svars="xyz")
    for f in formulas(alpha, 5):
        assert streaming_residue(f) == bool_transform(f)


def test_residue_handles_nominals():
    f = P("#i & [] @#i #i")
    assert eval_residue(bool_transform(f)) == decide_nat_qe(f).satisfiable


def test_nat_qe_examples():
    assert decide_nat_qe(P("down x. <> $x")).verdict == "unsat"
    assert decide_nat_qe(P("<> true")).verdict == "sat"
    v = decide_nat_qe(P("<> (#i & <> #j)"))
    assert v.witness["valuation"] == {"i": 1, "j": 2} and v.witness["state"] == 0
    v = decide_nat_qe(P("@$x <> $y & $y"))
    assert v.witness["assignment"] == {"x": 0, "y": 1} and v.witness["state"] == 1


def test_nat_qe_resource_limit_gives_unknown():
    f = P("down x. <> down y. <> [] (@$x <> $y | <> down z. @$y <> $z)")
    v = decide_nat_qe(f, limit=1)
    assert v.verdict == "unknown" and v.satisfiable is None


def test_np_nat_examples():
    v = decide_np_nat(P("<> (#i & <> #j)"))
    assert v.satisfiable and v.witness["valuation"] == {"i": 1, "j": 2}
    assert verify(P("<> (#i & <> #j)"), v)
    assert not decide_np_nat(P("#i & <> #i")).satisfiable
    assert not decide_nat_qe(P("#i & <> #i")).satisfiable
    assert not decide_np_nat(P("<> #i & @#i [] false")).satisfiable
    assert not decide_nat_qe(P("<> #i & @#i [] false")).satisfiable


def test_np_lin_examples():
    v = decide_np_lin(PHI_D)
    assert v.satisfiable and Dense() in model_from_json(v.witness["model"]).segments
    assert verify(PHI_D, v)
    assert not decide_np_nat(PHI_D).satisfiable
    v = decide_np_lin(P("<> #i & @#i [] false"))
    assert v.satisfiable
    assert v.witness["model"]["segments"] == [{"type": "point", "nominals": []},
                                              {"type": "point", "nominals": ["i"]}]
    assert not decide_np_lin(P("false")).satisfiable


def test_np_handles_binders_and_props():
    for text in ("down x. <> $x", "<> down x. <> @$x #i", "p & <> q",
                 "down x. <> [] down y. <> $y", "$x & <> $y & @$y [] false"):
        f = P(text)
        for frame in ("nat", "lin"):
            v = decide(f, frame)
            assert v.route == "np-small-model"
            assert verify(f, v)
        assert decide_np_nat(f).verdict == decide_nat_qe(normalize_monotone(f, False)).verdict


def test_np_matches_qe_on_random_formulas():
    rng = random.Random(17)
    alphabets = [alphabet("dba", nominals="ij"), alphabet("dva", svars="xy", nominals="i"),
                 alphabet("dbv", svars="xy"), alphabet("dbva", svars="x")]
    checked = 0
    while checked < 300:
        f = random_formula(rng, rng.choice(alphabets), 9)
        ops = analyze(f).signature.operators
        if Op.DIAMOND not in ops or ops == frozenset(Op):
            continue
        checked += 1
        v = decide_np_nat(f)
        assert v.verdict == decide_nat_qe(f, witness=False).verdict, f
        assert verify(f, v)


def test_canonical_assignment_lemma():
    alpha = alphabet("bva", svars="xy")
    for f in itertools.islice(formulas(alpha, 5), 0, None, 7):
        assert decide_nat_qe(f, witness=False).satisfiable == decide_at(f, canonical_assignment(f), 0)


def test_decide_dispatch_and_errors():
    assert decide(P("[] false"), "nat").to_json() == {
        "verdict": "unsat", "route": "nat-logspace", "frame": "nat"}
    v = decide(P("[] false"), "lin")
    assert (v.verdict, v.route) == ("sat", "lin-box-free")
    assert decide(P("[] false"), "nat", "nat-qe").verdict == "unsat"
    with pytest.raises(UnsupportedRoute) as info:
        decide(P("down x. <> [] @$x $x"), "lin")
    assert info.value.route == "unsupported-nonelementary"
    with pytest.raises(UnsupportedRoute):
        decide(P("<> true"), "nat", "nat-logspace")
    with pytest.raises(ValueError):
        decide(P("true"), "nat", "no-such-route")


def test_finite_fallback_for_full_operators():
    # every state has a successor: no finite model
    f = P("down x. @$x [] <> true & <> true")
    v = decide(f, "lin", fallback_states=3)
    assert v.verdict == "unknown"
    f = P("down x. <> ($x | [] @$x [] false)")
    v = decide(f, "lin", fallback_states=3)
    assert v.verdict == "sat" and verify(f, v)


def test_forced_routes_agree():
    rng = random.Random(3)
    alpha = alphabet("bva", svars="xy")
    for _ in range(200):
        f = random_formula(rng, alpha, 7)
        verdicts = {decide(f, "nat", r).verdict for r in ("nat-logspace", "nat-qe")}
        assert len(verdicts) == 1


def test_normalization_preserves_verdicts():
    rng = random.Random(8)
    alpha = alphabet("dbva", svars="x", nominals="i")
    alpha.leaves += [Prop("p"), Prop("q")]
    for _ in range(200):
        f = random_formula(rng, alpha, 7)
        g = normalize_monotone(f, False)
        for frame in ("nat", "lin"):
            try:
                a = decide(f, frame)
            except UnsupportedRoute:
                continue
            assert a.verdict == decide(g, frame).verdict


def test_witnesses_verify():
    rng = random.Random(21)
    alpha = alphabet("dbva", svars="xy", nominals="i")
    for _ in range(200):
        f = random_formula(rng, alpha, 8)
        for frame in ("nat", "lin"):
            try:
                v = decide(f, frame)
            except UnsupportedRoute:
                continue
            assert verify(f, v), (f, frame, v)


def test_verify_rejects_bad_witness():
    f = P("<> (#i & <> #j)")
    v = decide_nat_qe(f)
    bad = Verdict("sat", v.route, "nat", {**v.witness, "valuation": {"i": 2, "j": 1}})
    assert not verify(f, bad)
