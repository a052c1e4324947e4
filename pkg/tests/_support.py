"""Helpers shared by the test modules."""

import itertools

from hylosat.fol import Eq, Exists, FolAnd, FolNot, FolOr, Forall, Less, Pred
from hylosat.formula import Op, analyze, size
from hylosat.kripke import FiniteLinearModel, check_finite
from hylosat.reductions import FolPFormula, MacroLibrary


def fol_size(f) -> int:
    t = type(f)
    if t in (FolAnd, FolOr):
        return 1 + fol_size(f.left) + fol_size(f.right)
    if t in (FolNot, Exists, Forall):
        return 1 + fol_size(f.body)
    return 1


def random_folp(rng, max_quantifiers=3, max_atoms=4) -> FolPFormula:
    names = [f"v{k}" for k in range(rng.randint(1, max_quantifiers))]
    prefix = tuple((rng.choice(["exists", "forall"]), v) for v in names)

    def atom():
        r = rng.random()
        if r < 0.4:
            a = Pred("P", rng.choice(names))
        elif r < 0.8:
            a = Less(rng.choice(names), rng.choice(names))
        else:
            a = Eq(rng.choice(names), rng.choice(names))
        return FolNot(a) if rng.random() < 0.3 else a

    def matrix(budget):
        if budget <= 1:
            return atom()
        k = rng.randint(1, budget - 1)
        op = FolAnd if rng.random() < 0.5 else FolOr
        return op(matrix(k), matrix(budget - k))

    return FolPFormula(prefix, matrix(rng.randint(1, max_atoms)))


def macro_library_size() -> int:
    lib = MacroLibrary("a")
    return size(lib.psi1()) + size(lib.psi2())


def folp_contract(out, source: FolPFormula, lib_size: int, c: int = 1) -> list[str]:
    """Violations of the encoder's syntactic contract (empty when it holds)."""
    sig, _, free = analyze(out)
    bad = []
    if not sig.monotone:
        bad.append("negation")
    if sig.uses_props:
        bad.append("propositions")
    if sig.uses_nominals:
        bad.append("nominals")
    if sig.operators != frozenset(Op):
        bad.append(f"operators {sorted(o.value for o in sig.operators)}")
    if free != {"a"}:
        bad.append(f"free variables {sorted(free)}")
    if size(out) > c * fol_size(source.as_fol()) * lib_size:
        bad.append(f"size {size(out)}")
    return bad


def macro_micro_checks(lib: MacroLibrary, max_states: int = 6) -> list[str]:
    """Finite chains with ``a`` at state 0 and every placement of ``x, y``.

    On the region right of the anchor: ``dirSuc(x, y)`` for ``x < y`` holds
    iff ``y = x + 1``, ``dirPred(x)`` holds for every ``x >= 1``, and
    ``noDirPred(x)`` holds iff ``x <= 1``.
    """
    a = lib.a
    suc, pred, nopred = lib.dir_suc("x", "y"), lib.dir_pred("x"), lib.no_dir_pred("x")
    bad = []
    for n in range(1, max_states + 1):
        for x, y in itertools.product(range(n), repeat=2):
            m = FiniteLinearModel(n, svars={a: 0, "x": x, "y": y})
            if x < y and check_finite(m, 0, suc) != (y == x + 1):
                bad.append(f"dirSuc n={n} x={x} y={y}")
            if x >= 1 and not check_finite(m, 0, pred):
                bad.append(f"dirPred n={n} x={x}")
            if x >= 1 and check_finite(m, 0, nopred) != (x <= 1):
                bad.append(f"noDirPred n={n} x={x}")
    return bad
