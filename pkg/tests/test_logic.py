import random

import pytest

from dioprefix.logic import (
    BoxError,
    Quant,
    UnboundVariableError,
    add,
    call,
    eq0,
    eval_bounded,
    eval_term,
    exists,
    forall,
    free_vars,
    mul,
    parse_formula,
    parse_term,
    power,
    prefix_tag,
    print_formula,
    print_term,
    term,
)
from dioprefix.polyring import MissingVariableError, Poly
from dioprefix.sexpr import ParseError

from gen import random_formula, random_poly, random_term

FUNCS = {"f": lambda x, y: x - 2 * y, "g": lambda x, y: x * y + 1}


def test_trivial_examples():
    f = parse_formula("(exists x (= (- (^ x 2) 4) 0))")
    assert eval_bounded(f, box={"x": (-5, 5)})
    assert not eval_bounded(f, box={"x": (-1, 1)})
    f = parse_formula("(exists (x 0 3) (= (- (^ x 2) 4) 0))")
    assert eval_bounded(f)
    f = parse_formula("(forall (x 0 2) (exists (y 0 4) (= (- y (^ x 2)) 0)))")
    assert eval_bounded(f)
    f = parse_formula("(forall (x 0 3) (exists (y 0 4) (= (- y (^ x 2)) 0)))")
    assert not eval_bounded(f)


def test_bounded_upper_bound_shape():
    f = parse_formula("(forall (x 0 (+ q 1)) (>= (- (+ q 1) x) 0))", free=["q"])
    assert isinstance(f, Quant) and f.bound is not None
    assert print_term(f.bound[1]) == "(+ q 1)"
    assert eval_bounded(f, {"q": 5})
    assert free_vars(f) == {"q"}


def test_vacuous_ranges():
    f = parse_formula("(forall (x 3 1) (= 1 0))")
    assert eval_bounded(f)
    f = parse_formula("(exists (x 3 1) (= 0 0))")
    assert not eval_bounded(f)
    # box intersected with the bound can also be empty
    f = parse_formula("(forall (x 0 5) (= 1 0))")
    assert eval_bounded(f, box={"x": (10, 20)})


def test_box_intersects_bound():
    f = parse_formula("(exists (x 0 100) (= (- x 50) 0))")
    assert eval_bounded(f)
    assert not eval_bounded(f, box={"x": (0, 10)})


def test_errors():
    with pytest.raises(UnboundVariableError):
        parse_formula("(exists x (= (- x y) 0))")
    with pytest.raises(ParseError):
        parse_formula("(exists x (= x 0)")
    with pytest.raises(ParseError):
        parse_formula("(exists (x 1) (= x 0))")
    with pytest.raises(ParseError):
        parse_formula("(implies (= 1 0) (= 1 0))")
    with pytest.raises(ValueError):
        parse_formula("(< 1 0)")
    with pytest.raises(BoxError):
        eval_bounded(parse_formula("(exists x (= x 0))"))
    with pytest.raises(MissingVariableError):
        eval_bounded(parse_formula("(= a 0)", free=["a"]))


def test_connectives():
    f = parse_formula("(and (>= a 0) (not (= a 3)) (or (= a 1) (/= a 2)))", free=["a"])
    assert [eval_bounded(f, {"a": v}) for v in range(-1, 5)] == [False, True, True, False, False, True]


def test_prefix_tag():
    f = parse_formula("(exists x (exists y (forall z (exists w (= (+ x y z w) 0)))))")
    assert prefix_tag(f) == "E2A1E1"
    assert prefix_tag(parse_formula("(free (a) (= a 0))")) == ""


def test_calls_and_powers():
    t = parse_term("(^ (@ f x 1) 3)")
    assert eval_term(t, {"x": 5}, FUNCS) == 27
    assert print_term(t) == "(^ (@ f x 1) 3)"
    assert eval_term(call("g", "x", 2), {"x": 4}, FUNCS) == 9
    with pytest.raises(Exception):
        eval_term(call("h", 1), {}, FUNCS)


def test_term_builders():
    assert eval_term(add("x", mul(2, "y"), power("x", 2)), {"x": 3, "y": -1}) == 10
    assert mul(0, "x") == term(0)
    big = mul(*(add("x", i) for i in range(10)))
    assert eval_term(big, {"x": 1}) == 3628800


def test_term_round_trip_fuzz():
    rng = random.Random(31)
    for _ in range(2000):
        t = random_term(rng, ["x", "y", "a"], depth=3)
        assert parse_term(print_term(t)) == t


def test_formula_round_trip_fuzz():
    rng = random.Random(32)
    for _ in range(10 ** 4):
        f = random_formula(rng)
        text = print_formula(f)
        g = parse_formula(text, free=["a"])
        assert g == f
        assert print_formula(g) == text


def _existential(rng):
    p = random_poly(rng, ["a", "x", "y"], max_terms=3, max_deg=2, coeff=3)
    if rng.random() < 0.3:
        p = p + Poly.var("x") - Poly.var("a") - rng.randint(-6, 6)
    inner = random_term(rng, ["a", "x", "y"], depth=1) if rng.random() < 0.3 else term(0)
    return exists("x", exists("y", eq0(add(p, mul(inner, "x", "y", add("x", -1))))))


def test_existential_monotone_in_box():
    rng = random.Random(33)
    flips = 0
    for _ in range(300):
        f = _existential(rng)
        a = rng.randint(-3, 3)
        small = {"x": (-2, 2), "y": (-2, 2)}
        large = {"x": (-4, 5), "y": (-6, 3)}
        s = eval_bounded(f, {"a": a}, small, FUNCS)
        l = eval_bounded(f, {"a": a}, large, FUNCS)
        assert not (s and not l)
        flips += l and not s
    assert flips > 0


def test_universal_dual():
    rng = random.Random(34)
    for _ in range(200):
        body = eq0(random_term(rng, ["a", "x"], depth=1))
        a = rng.randint(-3, 3)
        box = {"x": (-3, 3)}
        lhs = eval_bounded(forall("x", body), {"a": a}, box, FUNCS)
        rhs = all(eval_bounded(body, {"a": a, "x": x}, funcs=FUNCS) for x in range(-3, 4))
        assert lhs == rhs
