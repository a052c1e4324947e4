"""Parsing, printing and analysing hybrid formulas."""

from hylosat.formula import analyze, normalize_monotone, parse, rename_apart, to_text

f = parse("down x. [] (@$x <> #i | down x. $x)")
print("parsed   :", to_text(f))

# the analysis reports which operators occur and what is left free
info = analyze(f)
print("operators:", sorted(op.value for op in info.signature.operators))
print("md       :", info.modal_depth, " free:", sorted(info.free_svars))

# the inner binder shadows the outer one; renaming apart makes names unique
print("apart    :", to_text(rename_apart(f)))

# nominals become state variables bound at the root when binders are allowed
print("normal   :", to_text(normalize_monotone(f, binder_mode=True)))
