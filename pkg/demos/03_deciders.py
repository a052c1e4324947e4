"""Routing formulas to the cheapest sound decision procedure."""

from hylosat import decide, parse, route

cases = [
    ("down x. @$x $x", "lin"),
    ("[] false", "lin"),
    ("[] false", "nat"),
    ("@#i [] #j", "nat"),
    ("down x. [] down y. @$x <> $y", "nat"),
    ("<> #i & @#i [] false", "nat"),
    ("down x. <> [] @$x <> $x", "nat"),
    ("down x. <> [] @$x <> $x", "lin"),
]
for text, frame in cases:
    f = parse(text)
    name = route(f, frame)
    if name == "unsupported-nonelementary":
        print(f"{frame:3} {name:26} {text}")
        continue
    v = decide(f, frame)
    print(f"{frame:3} {name:26} {v.verdict:6} {text}")

# phi_d needs a dense block between i and j, so the witness shows one
v = decide(parse("#i & <> <> #j & [] (#j | <> <> #j)"), "lin")
print("witness over lin:", v.witness["model"])
