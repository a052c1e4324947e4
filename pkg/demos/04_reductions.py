"""Hardness reductions: each encoder is checked against a brute-force oracle."""

from hylosat.deciders import decide_nat_logspace, decide_nat_qe, decide_np_nat
from hylosat.formula import parse, to_text
from hylosat.reductions import (
    encode_3sat, encode_folp, encode_ord, encode_qbf, oracle_eval, parse_dimacs, parse_folp,
    parse_ord, parse_qbf, skolemize,
)

q = parse_qbf("forall x. exists y. ((x & y) | (!x & !y))")
print("QBF truth:", oracle_eval(q), " encoded verdict:", decide_nat_qe(encode_qbf(q)).verdict)

cnf = parse_dimacs("p cnf 2 2\n1 2 2 0\n-1 -1 -2 0\n")
print("CNF truth:", oracle_eval(cnf), " encoded verdict:", decide_np_nat(encode_3sat(cnf)).verdict)

o = parse_ord('{"vertices": ["a", "b", "c"], "successor": [["a", "b"], ["b", "c"]], "s": "c", "t": "a"}')
print("ORD truth:", oracle_eval(o), " encoded verdict:", decide_nat_logspace(encode_ord(o)).verdict)

# binder removal keeps satisfiability
f = parse("<> down x. <> @$x <> #i")
print("skolemized:", to_text(skolemize(f)))

# the FOL(<, P) encoder only promises a syntactic contract here
enc = encode_folp(parse_folp("forall x. exists y. x < y & P(y)"))
print("encoded FOL(<,P) formula has", len(to_text(enc)), "characters")
