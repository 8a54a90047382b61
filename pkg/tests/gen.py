"""Seeded random generators shared by the fuzz tests."""

from __future__ import annotations

import random

from dioprefix.logic import And, Not, Or, Quant, Rel, add, call, mul, power, term
from dioprefix.polyring import Poly

NAMES = ("x", "y", "z", "a", "b", "t1", "q_2")


def random_poly(rng: random.Random, names=NAMES, max_terms=5, max_deg=4, coeff=50) -> Poly:
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        mono = tuple(
            (v, rng.randint(1, max_deg)) for v in sorted(rng.sample(names, rng.randint(0, min(3, len(names)))))
        )
        terms[mono] = rng.randint(-coeff, coeff)
    if rng.random() < 0.05:
        terms[()] = rng.choice([10 ** 40 + 7, -(10 ** 25)])
    return Poly.from_terms(terms)


def random_term(rng: random.Random, names, depth=2):
    r = rng.random()
    if depth == 0 or r < 0.4:
        return term(random_poly(rng, names, max_terms=3, max_deg=3))
    if r < 0.6:
        return add(*(random_term(rng, names, depth - 1) for _ in range(rng.randint(2, 3))))
    if r < 0.8:
        return mul(*(random_term(rng, names, depth - 1) for _ in range(rng.randint(2, 3))))
    if r < 0.9:
        return power(random_term(rng, names, depth - 1), rng.randint(2, 3))
    return call(rng.choice(["f", "g"]), *(random_term(rng, names, depth - 1) for _ in range(2)))


def random_formula(rng: random.Random, bound=("a",), depth=3):
    r = rng.random()
    if depth == 0 or r < 0.3:
        return Rel(random_term(rng, list(bound), depth=1), rng.choice(["=", ">=", "/="]))
    if r < 0.4:
        return Not(random_formula(rng, bound, depth - 1))
    if r < 0.55:
        cls = rng.choice([And, Or])
        return cls(tuple(random_formula(rng, bound, depth - 1) for _ in range(rng.randint(2, 3))))
    v = rng.choice([n for n in NAMES if n not in bound] or ["w"])
    inner = bound + (v,)
    b = None
    if rng.random() < 0.5:
        outer = list(bound)
        b = (term(random_poly(rng, outer, 2, 2, 5)), term(random_poly(rng, outer, 2, 2, 5)))
    return Quant(rng.choice(["exists", "forall"]), v, b, random_formula(rng, inner, depth - 1))
