"""Standard translation into FOL over (N, <) and quantifier elimination."""

from hylosat.fol import (
    DifferenceSystem, close_sentence, eval_graded, fol_to_text, parse_fol, qe_decide,
    translate_H,
)
from hylosat.formula import parse

f = parse("down x. [] @$x <> $x")
print("H(f)    :", fol_to_text(translate_H(f)))
print("closed  :", fol_to_text(close_sentence(f)))
print("qe      :", qe_decide(close_sentence(f)))

for text in ["forall x. exists y. x < y", "exists x. forall y. x < y | x = y",
             "exists x. x < 3 & 2 < x"]:
    s = parse_fol(text)
    print(f"{text:40} qe={qe_decide(s)} graded={eval_graded(s)}")

# projection of a difference-bound system: exists y. x + 2 <= y <= 5
ds = DifferenceSystem([("x", "y", -2), ("y", "", 5)])
print("project y:", ds.project("y"))
