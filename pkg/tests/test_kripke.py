import itertools
import json

import pytest

from hylosat.formula import Diamond, modal_depth, parse
from hylosat.generate import alphabet, formulas
from hylosat.kripke import (
    Dense, FiniteLinearModel, ModelError, Point, SegmentedLinearModel, check_finite,
    check_segmented, extension, model_from_json, model_to_json, quotient, sat_search_finite,
)

PHI_D = parse("#i & <> <> #j & [] (#j | <> <> #j)")


def test_check_examples():
    m = FiniteLinearModel(3, {"i0": 1, "i1": 2})
    assert check_finite(m, 0, parse("<> (#i0 & <> #i1)"))
    assert not check_finite(m, 1, parse("<> (#i0 & <> #i1)"))
    for n in range(1, 5):
        assert check_finite(FiniteLinearModel(n), n - 1, parse("[] false"))
        for w in range(n):
            assert check_finite(FiniteLinearModel(n), w, parse("down x. $x"))


def test_check_props_and_negation():
    m = FiniteLinearModel(3, props={"p": frozenset({2})})
    assert check_finite(m, 0, parse("<> p & !p"))
    assert not check_finite(m, 2, parse("<> p"))


def test_unknown_atoms_raise():
    with pytest.raises(ModelError):
        check_finite(FiniteLinearModel(2), 0, parse("#i"))
    with pytest.raises(ModelError):
        check_finite(FiniteLinearModel(2), 0, parse("@$x true"))


def test_model_validation():
    with pytest.raises(ModelError):
        FiniteLinearModel(0)
    with pytest.raises(ModelError):
        FiniteLinearModel(2, {"i": 2})
    with pytest.raises(ModelError):
        SegmentedLinearModel((Point(frozenset("i")), Point(frozenset("i"))))
    with pytest.raises(ModelError):
        SegmentedLinearModel((Dense(), Dense()))


def test_diamond_is_existential_over_later_states():
    alpha = alphabet("dba", nominals="i")
    for f in itertools.islice(formulas(alpha, 4), 400):
        for n in range(1, 5):
            for i in range(n):
                m = FiniteLinearModel(n, {"i": i})
                for w in range(n):
                    expect = any(check_finite(m, v, f) for v in range(w + 1, n))
                    assert check_finite(m, w, Diamond(f)) == expect


def test_sat_search_examples():
    for bound in range(1, 5):
        assert sat_search_finite(parse("false"), bound) is None
    m, w = sat_search_finite(parse("[] false"), 3)
    assert m.size == 1 and w == 0
    m, w = sat_search_finite(parse("<> (#i0 & <> #i1)"), 3)
    assert m.size == 3 and w == 0 and m.nominals == {"i0": 1, "i1": 2}
    assert sat_search_finite(parse("<> (#i0 & <> #i1)"), 2) is None


def _delta_oracle(n, named):
    out = []
    for w in range(n):
        nxt = next((s for s in range(w + 1, n) if s in named), n)
        out.append(len(range(w + 1, nxt)))
    return out


def test_quotient_examples():
    m = FiniteLinearModel(6, {"i": 0, "j": 5})
    q = quotient(m, 1)
    assert list(q.delta[1:5]) == [3, 2, 1, 0]
    assert list(q.delta) == _delta_oracle(6, {0, 5})
    assert list(q.class_map) == [0, 1, 1, 2, 3, 4]
    assert q.model == FiniteLinearModel(5, {"i": 0, "j": 4})

    q = quotient(m, 0)
    assert list(q.class_map) == [0, 1, 1, 1, 2, 3]
    assert list(q.class_sizes) == [1, 3, 1, 1]

    for md in range(4):
        q = quotient(FiniteLinearModel(1, {"i": 0}), md)
        assert list(q.class_map) == [0] and q.model.size == 1


def test_quotient_json_shape():
    q = quotient(FiniteLinearModel(4, {"i": 3}), 0)
    out = json.loads(json.dumps(q.to_json()))
    assert out["class_map"] == [0, 0, 1, 2]
    assert out["delta"] == [2, 1, 0, 0]
    assert out["model"] == {"kind": "finite", "states": 3, "nominals": {"i": 2}, "svars": {}}


def test_quotient_rejects_variables():
    with pytest.raises(ModelError):
        quotient(FiniteLinearModel(2, svars={"x": 0}), 1)


def _shapes(max_states, names):
    for n in range(1, max_states + 1):
        for places in itertools.product(range(n), repeat=len(names)):
            yield FiniteLinearModel(n, dict(zip(names, places)))


def test_inseparability():
    alpha = alphabet("dba", nominals="ij")
    fs = list(formulas(alpha, 4))
    for m in _shapes(6, "ij"):
        for md in range(3):
            q = quotient(m, md)
            groups = {}
            for w, c in enumerate(q.class_map):
                groups.setdefault(c, []).append(w)
            for f in fs:
                if modal_depth(f) > md:
                    continue
                ext = extension(m, f)
                for members in groups.values():
                    bits = {ext >> w & 1 for w in members}
                    assert len(bits) == 1


def test_phi_d_segmented():
    m = SegmentedLinearModel((Point(frozenset("i")), Dense(), Point(frozenset("j"))))
    assert check_segmented(m, 0, PHI_D)
    assert m.has_dense


def test_phi_d_fails_without_dense_blocks():
    for m in _shapes(8, "ij"):
        assert extension(m, PHI_D) == 0


def test_dense_block_has_successors():
    m = SegmentedLinearModel((Dense(),))
    assert check_segmented(m, 0, parse("<> true"))
    assert check_segmented(m, 0, parse("<> <> <> true"))
    assert not check_segmented(SegmentedLinearModel((Point(),)), 0, parse("<> true"))


def test_segmented_matches_finite_without_dense():
    alpha = alphabet("dba", nominals="ij")
    fs = list(formulas(alpha, 5))
    for m in _shapes(4, "ij"):
        seg = SegmentedLinearModel(tuple(
            Point(frozenset(k for k, v in m.nominals.items() if v == s)) for s in range(m.size)))
        assert seg.to_finite() == m
        for f in fs:
            ext = extension(m, f)
            for w in range(m.size):
                assert check_segmented(seg, w, f) == bool(ext >> w & 1)


def test_segmented_rejects_binders():
    m = SegmentedLinearModel((Point(),))
    with pytest.raises(ModelError):
        check_segmented(m, 0, parse("down x. $x"))


def test_json_round_trip():
    ms = [
        FiniteLinearModel(3, {"i": 1}, {"x": 0}),
        FiniteLinearModel(2, props={"p": frozenset({0, 1})}),
        SegmentedLinearModel((Point(frozenset("i")), Dense(), Point(frozenset("jk")))),
    ]
    for m in ms:
        data = json.loads(json.dumps(model_to_json(m)))
        assert model_from_json(data) == m


@pytest.mark.parametrize("data", [
    [], {"kind": "tree"}, {"kind": "finite"}, {"kind": "finite", "states": "3"},
    {"kind": "finite", "states": 2, "nominals": {"i": 5}},
    {"kind": "segmented", "segments": [{"type": "blob"}]},
])
def test_json_errors(data):
    with pytest.raises(ModelError):
        model_from_json(data)
