import math
import random

import pytest

from dioprefix import oracles
from dioprefix.formulas import (
    ALL_KINDS,
    EXTERNAL_MARKER,
    REPR_KINDS,
    build_repr,
    default_funcs,
    jk_term,
    lemma51_disjunction,
    make_context,
    reachable_calls,
    tag_prefix,
    th11_floor_sqrt_claim,
    th12_unique_sign,
    th13_forward,
    th13_k,
    th13_pm,
)
from dioprefix.gadgets import nearest_power
from dioprefix.logic import (
    compile_term,
    eval_bounded,
    eval_term,
    free_vars,
    matrix,
    parse_formula,
    prefix_tag,
    print_formula,
    quantifier_prefix,
)
from dioprefix.polyring import parse_poly
from dioprefix.radical import jk_homogeneous_value
from dioprefix.reduction import forward_certificate, holds_for_all_t, m_value, r_bound, spec_build

NATURALS = spec_build(parse_poly("(- z1 a)"))
_BUILT = {}


def built(kind):
    if kind not in _BUILT:
        _BUILT[kind] = build_repr(kind, NATURALS)
    return _BUILT[kind]


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_prefix_and_round_trip(kind):
    f = built(kind)
    assert prefix_tag(f) == tag_prefix(kind)
    assert free_vars(f) == frozenset()
    g = parse_formula(print_formula(f))
    assert g == f
    calls = reachable_calls(f)
    if kind == "A1E7":
        assert EXTERNAL_MARKER in calls
    else:
        assert calls <= set(default_funcs(NATURALS))


def test_repr_kind_list():
    assert len(REPR_KINDS) == 14
    assert tag_prefix("E1A2E3_bounded") == "E1A2E3"
    with pytest.raises(ValueError):
        build_repr("E9", NATURALS)
    with pytest.raises(ValueError):
        make_context(NATURALS, embed="inline")


def test_named_shapes():
    assert prefix_tag(built("E2A1E3")) == "E2A1E3"
    kinds = [q.kind for q in quantifier_prefix(built("A1E1A3E2"))]
    assert kinds == ["forall", "exists", "forall", "forall", "forall", "exists", "exists"]


def test_power_kind_bounded_window():
    f = built("E1A2E3_bounded")
    qs = quantifier_prefix(f)
    assert [q.var for q in qs[:3]] == ["q", "b", "t"]
    assert qs[0].bound is None
    funcs = default_funcs(NATURALS)
    for a in range(0, 3):
        for q in range(-3, 4):
            env = {"a": a, "q": q}
            lo_b, hi_b = (eval_term(x, env, funcs) for x in qs[1].bound)
            assert (lo_b, hi_b) == (0, 8 * q * q + 1)
            m2 = (4 * q - 1) ** 2 + 1
            lo_t, hi_t = (eval_term(x, {**env, "b": 0}, funcs) for x in qs[2].bound)
            assert lo_t == -(m2 ** 2)
            assert hi_t == r_bound(NATURALS, a, m2)


def test_s_variant_window():
    qs = quantifier_prefix(built("E1A1E1A2E2_bounded"))
    for a, s in [(0, 0), (1, 5), (3, 17)]:
        lo, hi = (eval_term(x, {"a": a, "s": s}) for x in qs[1].bound)
        assert (lo, hi) == (-s * s, r_bound(NATURALS, a, s))
        # widening is sound: the window for c = isqrt(s) sits inside
        c = math.isqrt(s)
        assert lo <= -c * c and r_bound(NATURALS, a, c) <= hi


@pytest.mark.parametrize("kind", ["E2A1E3", "A2E4", "E1A1E1A2E2", "A1E1A1E3", "E1A1E4", "E1A2E3", "A1E2A2E2"])
def test_call_and_symbolic_embeddings_agree(kind):
    f_call = build_repr(kind, NATURALS, embed="call")
    f_sym = build_repr(kind, NATURALS, embed="symbolic")
    assert "M" in reachable_calls(f_call)
    assert "M" not in reachable_calls(f_sym)
    assert prefix_tag(f_call) == prefix_tag(f_sym)
    t_call, t_sym = matrix(f_call).term, matrix(f_sym).term
    names = sorted(t_call.free_vars())
    assert set(names) == set(t_sym.free_vars())
    funcs = default_funcs(NATURALS)
    ev_call, ev_sym = compile_term(t_call, funcs), compile_term(t_sym, funcs)
    rng = random.Random(kind)
    for _ in range(25):
        env = {v: rng.randint(-3, 3) for v in names}
        assert ev_call(dict(env)) == ev_sym(dict(env))


def test_m_embedding_matches_m_value():
    ctx = make_context(NATURALS, embed="symbolic")
    t = ctx.M("b", "c", "t")
    rng = random.Random(8)
    for _ in range(30):
        env = {"a": rng.randint(0, 4), "b": rng.randint(-3, 40), "c": rng.randint(-20, 200), "t": rng.randint(-50, 50)}
        assert eval_term(t, env) == m_value(NATURALS, env["a"], env["b"], env["c"], env["t"])


def _inner(f, skip):
    g = f.body  # strip the free-parameter wrapper
    for _ in range(skip):
        g = g.body
    return g


def test_square_kind_inner_block():
    # with a toy M(a, b, c, t) = t the inner block says t >= 0 (resp. t <= -1)
    toy = {"M": lambda a, b, c, t: t}
    box = {v: (-4, 4) for v in "xyz"}
    pos, neg = _inner(built("E2A1E3"), 3), _inner(built("A2E4"), 3)
    for t in range(-6, 11):
        env = {"a": 0, "b": 1, "c": 2, "t": t}
        assert eval_bounded(pos, env, box, toy) == (t >= 0)
        assert eval_bounded(neg, env, box, toy) == (t <= -1)


def test_jk_term_homogeneous():
    rng = random.Random(12)
    for k in (1, 2, 3):
        As = [rng.randint(-5, 20) for _ in range(k)]
        t = jk_term(As, "Y", "U")
        for _ in range(10):
            Y, U = rng.randint(-30, 30), rng.randint(-4, 4)
            assert eval_term(t, {"Y": Y, "U": U}, default_funcs()) == jk_homogeneous_value(As, Y, U)


# -- claims ----------------------------------------------------------------------


def test_floor_sqrt_examples():
    assert th11_floor_sqrt_claim(10) == 3
    assert th11_floor_sqrt_claim(0) == 0
    with pytest.raises(ValueError):
        th11_floor_sqrt_claim(-1)


def test_floor_sqrt_exhaustive():
    for s in range(0, 10 ** 4 + 1):
        cs = [c for c in range(0, 102) if (s - c * c) * (s - c * c - c) <= 0]
        got = th11_floor_sqrt_claim(s)
        if got is None:
            assert cs == [] and s - math.isqrt(s) ** 2 > math.isqrt(s)
        else:
            assert cs == [got] == [math.isqrt(s)]


def test_floor_sqrt_window_chain():
    # s >= c^2 >= c >= 0 for the pinned c, so R(a, c) <= R(a, s)
    for s in range(0, 400):
        c = th11_floor_sqrt_claim(s)
        if c is not None:
            assert s >= c * c >= c >= 0
            assert r_bound(NATURALS, 2, c) <= r_bound(NATURALS, 2, s)


def test_unique_sign_examples():
    assert th12_unique_sign(4) == 2
    assert th12_unique_sign(2) == -1
    with pytest.raises(ValueError):
        th12_unique_sign(-3)


def test_unique_sign_exhaustive():
    for s in range(0, 10 ** 4 + 1):
        r = math.isqrt(s)
        mod = 4 * (s - r * r) + 3
        hits = {c for c in (r, -r) if (c + 1) % mod == 0}
        assert len(hits) <= 1
        got = th12_unique_sign(s)
        assert (got is None and not hits) or hits == {got}


def test_pm_examples():
    assert all(v > 0 for v in th13_pm(2, 1, 2))
    assert th13_pm(1, 1, 2)[0] <= 0
    for k in (0, 3, -2):
        with pytest.raises(ValueError):
            th13_pm(1, 1, k)


def test_pm_nearest_power_grid():
    for k in (2, 4):
        for q in range(-125, 126):
            m = 4 * q - 1
            best = set(oracles.nearest_scan(m, k, -40, 40))
            for b in range(-30, 31):
                Pp, Pm = th13_pm(b, q, k)
                assert (Pp > 0 and Pm > 0) == (b in best)


def test_q_construction_chain():
    spec = spec_build(parse_poly("(- a (^ z1 2))"), "evensq4")
    cert = forward_certificate(spec, 4, [2])
    assert cert.problems(spec) == []
    b0 = math.isqrt(cert.b - 4)
    assert b0 * b0 + 4 == cert.b and b0 % 2 == 0
    out = th13_forward(spec, b0, cert.c)
    k = out["k"]
    assert k == th13_k(spec) and k % 2 == 0 and k > 0
    assert out["c_back"] == cert.c
    assert all(v > 0 for v in out["P"])
    assert nearest_power(out["m"], k) == b0
    assert holds_for_all_t(spec, 4, b0 * b0 + 4, out["c_back"])
    with pytest.raises(ValueError):
        th13_forward(spec, b0 + 1, cert.c)


# -- disjunction through universals -------------------------------------------------


def test_universal_disjunction_shapes():
    assert prefix_tag(lemma51_disjunction([0])) == "A2E2"
    assert prefix_tag(lemma51_disjunction([0, 1, 2])) == "A4E2"
    assert prefix_tag(lemma51_disjunction([0, 1], [1, 1])) == "A2E2"
    with pytest.raises(ValueError):
        lemma51_disjunction([])
    with pytest.raises(ValueError):
        lemma51_disjunction([1, 2], [3])


def test_universal_disjunction_true_single():
    f = lemma51_disjunction([0])
    box = {"x1": (-6, 6), "x": (-6, 6), "y": (-60, 60), "z": (-60, 60)}
    assert eval_bounded(f, box=box)


def test_universal_disjunction_countermodel():
    # 1 + 10 * 6^2 = 19^2 and 1 + 2 * 2^2 = 3^2, so J_2 has the integer root
    # x = 19 + 3 W with W = 1 + 361^2 + 9^2, where the matrix is -x1 x2 (2y+1)(3z+1) != 0.
    # The bounded search over y, z in the box therefore finds nothing; the
    # exact reason is that J_2 vanishes at this point.
    W = 1 + 361 ** 2 + 9 ** 2
    assert W == 130403
    X = 19 + 3 * W
    assert jk_homogeneous_value([361, 9], X, 1) == 0
    f = lemma51_disjunction([-3, -1])
    box = {"x1": (6, 6), "x2": (2, 2), "x": (X, X), "y": (-60, 60), "z": (-60, 60)}
    assert not eval_bounded(f, box=box, funcs=default_funcs())


def test_universal_disjunction_bounded():
    f = lemma51_disjunction([-2, 5], [3, 6])
    assert eval_bounded(f, box={"y": (-150, 150), "z": (-150, 150)})
    g = lemma51_disjunction([-1, -2], [1, 2])
    assert not eval_bounded(g, box={"y": (-30, 30), "z": (-30, 30)})
