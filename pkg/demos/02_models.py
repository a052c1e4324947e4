"""Model checking on finite chains and on chains with dense blocks, and
the quotient that collapses long gaps between nominals."""

from hylosat.formula import parse
from hylosat.kripke import (
    Dense, FiniteLinearModel, Point, SegmentedLinearModel, check_finite, check_segmented,
    quotient,
)

chain = FiniteLinearModel(6, nominals={"i": 0, "j": 5})
f = parse("<> <> #j")
print("6-chain, state 0:", check_finite(chain, 0, f))
print("6-chain, state 4:", check_finite(chain, 4, f))

# states far from every nominal look alike up to modal depth m
q = quotient(chain, 1)
print("quotient m=1 maps", list(range(6)), "to", q.class_map)
print("still true at the image of 0:", check_finite(q.model, q.class_map[0], f))

# a dense block between i and j makes this formula true; no discrete chain does
phi = parse("#i & <> <> #j & [] (#j | <> <> #j)")
seg = SegmentedLinearModel([Point(frozenset({"i"})), Dense(), Point(frozenset({"j"}))])
print("segmented model:", check_segmented(seg, 0, phi))
print("any chain of up to 8 states:", any(
    check_finite(FiniteLinearModel(n, {"i": a, "j": b}), w, phi)
    for n in range(1, 9) for a in range(n) for b in range(n) for w in range(n)))
