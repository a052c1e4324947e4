"""Exhaustive and random formula generation over a chosen fragment."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

from .formula import (
    BOTTOM, TOP, And, At, Box, Diamond, Down, Formula, Nominal, Or, SVar,
)


@dataclass
class Alphabet:
    leaves: list[Formula]
    unary: list[Callable[[Formula], Formula]]
    binary: list[Callable[[Formula, Formula], Formula]] = field(default_factory=lambda: [And, Or])


def alphabet(ops: str, svars: Sequence[str] = (), nominals: Sequence[str] = (),
             constants: bool = True) -> Alphabet:
    """Alphabet for a fragment; ``ops`` is any combination of the letters
    ``d`` (diamond), ``b`` (box), ``v`` (down) and ``a`` (@)."""
    leaves: list[Formula] = [TOP, BOTTOM] if constants else []
    leaves += [SVar(x) for x in svars] + [Nominal(i) for i in nominals]
    unary: list = []
    if "d" in ops:
        unary.append(Diamond)
    if "b" in ops:
        unary.append(Box)
    if "v" in ops:
        unary += [(lambda x: lambda f: Down(x, f))(x) for x in svars]
    if "a" in ops:
        unary += [(lambda t: lambda f: At(t, f))(SVar(x)) for x in svars]
        unary += [(lambda t: lambda f: At(t, f))(Nominal(i)) for i in nominals]
    return Alphabet(leaves, unary)


def by_size(alpha: Alphabet, max_nodes: int) -> list[list[Formula]]:
    """``out[n]`` lists every formula with exactly ``n`` nodes."""
    out: list[list[Formula]] = [[], list(alpha.leaves)]
    for n in range(2, max_nodes + 1):
        level = [u(f) for u in alpha.unary for f in out[n - 1]]
        for b in alpha.binary:
            for k in range(1, n - 1):
                for left in out[k]:
                    for right in out[n - 1 - k]:
                        level.append(b(left, right))
        out.append(level)
    return out


def formulas(alpha: Alphabet, max_nodes: int) -> Iterator[Formula]:
    for level in by_size(alpha, max_nodes):
        yield from level


def random_formula(rng: random.Random, alpha: Alphabet, max_nodes: int) -> Formula:
    """Random formula with at most ``max_nodes`` nodes."""
    budget = rng.randint(1, max_nodes)

    def build(n):
        if n <= 1 or (not alpha.unary and n < 3):
            return rng.choice(alpha.leaves)
        if n >= 3 and alpha.binary and rng.random() < 0.4:
            k = rng.randint(1, n - 2)
            return rng.choice(alpha.binary)(build(k), build(n - 1 - k))
        if alpha.unary:
            return rng.choice(alpha.unary)(build(n - 1))
        k = rng.randint(1, n - 2)
        return rng.choice(alpha.binary)(build(k), build(n - 1 - k))

    return build(budget)


def random_sentence(rng: random.Random, max_quantifiers: int = 3, max_numeral: int = 5,
                    max_atoms: int = 6):
    """Random closed FOL(<) sentence (numerals allowed as terms)."""
    from . import fol

    counter = [0]

    def term(scope):
        if scope and rng.random() < 0.7:
            return rng.choice(scope)
        return rng.randint(0, max_numeral)

    def gen(scope, q, a):
        r = rng.random()
        if q > 0 and r < 0.5:
            v = f"v{counter[0]}"
            counter[0] += 1
            body = gen(scope + [v], q - 1, a)
            return (fol.Exists if rng.random() < 0.5 else fol.Forall)(v, body)
        if a >= 2 and r < 0.85:
            qa = rng.randint(0, q)
            aa = rng.randint(1, a - 1)
            op = fol.FolAnd if rng.random() < 0.5 else fol.FolOr
            return op(gen(scope, qa, aa), gen(scope, q - qa, a - aa))
        if rng.random() < 0.15:
            return fol.FolNot(gen(scope, q, a))
        left, right = term(scope), term(scope)
        return (fol.Less if rng.random() < 0.6 else fol.Eq)(left, right)

    return gen([], rng.randint(1, max_quantifiers), rng.randint(1, max_atoms))
