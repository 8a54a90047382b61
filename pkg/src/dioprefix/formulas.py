"""Representation builders for mixed quantifier prefixes.

Every builder returns a closed formula with the single free parameter ``a``.
The master polynomial enters either as the evaluator-backed call
``(@ M a b c t)`` or, when its expansion fits the term guard, symbolically.
``J_k`` for ``k >= 3`` is always a call (``(@ J3 A1 A2 A3 x)``); for smaller
``k`` its homogenised form is expanded into the matrix.

``default_funcs`` supplies implementations for every call name used here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from . import gadgets
from .logic import (
    Call,
    Formula,
    Free,
    Lit,
    Term,
    add,
    call,
    conj,
    eq0,
    ge0,
    mul,
    neg,
    power,
    prenex,
    sub,
    substitute_term,
    term,
)
from .polyring import Poly, iroot
from .radical import jk_homogeneous_value, jk_symbolic
from .reduction import ExpansionGuardError, ReductionSpec, m_bound, m_value, q_factor_polys, r_poly

EXTERNAL_MARKER = "EXTERNAL"

REPR_KINDS = (
    "E2A1E3",
    "E2A3E2",
    "E1A1E1A2E2",
    "A2E4",
    "A1E1A1E3",
    "A2E1A2E2",
    "E1A1E4",
    "E1A1E4_bounded",
    "A1E1A3E2",
    "E1A2E3",
    "E1A2E3_bounded",
    "E1A6E2",
    "E1A5E2_bounded",
    "A1E2A2E2",
)

# Further kinds: the bounded-window form of the s-variant, and a skeleton
# whose matrix needs a polynomial that is not constructed here.
EXTRA_KINDS = ("E1A1E1A2E2_bounded",)
SKELETON_KINDS = ("A1E7",)
ALL_KINDS = REPR_KINDS + EXTRA_KINDS + SKELETON_KINDS


def tag_prefix(kind: str) -> str:
    return kind.split("_")[0]


# -- building blocks -------------------------------------------------------------


def m_term(spec: ReductionSpec, guard: int = 10 ** 6) -> Term:
    """``M = (b^2 - b)(Q + 1) - 1`` with ``Q`` kept as a product of its factors."""
    factors = q_factor_polys(spec, guard)
    return sub(mul(add(power("b", 2), neg("b")), add(mul(*map(Lit, factors)), 1)), 1)


@dataclass
class Context:
    spec: ReductionSpec
    M_symbolic: Term | None = None

    def M(self, b, c, t) -> Term:
        """``M(a, b, c, t)`` as a term."""
        if self.M_symbolic is not None:
            return substitute_term(self.M_symbolic, {"b": term(b), "c": term(c), "t": term(t)})
        return call("M", "a", b, c, t)

    def R(self, c) -> Term:
        """``R(a, c)``."""
        return substitute_term(Lit(r_poly(self.spec)), {"c": term(c)})


def make_context(spec: ReductionSpec, embed: str = "call", guard: int = 10 ** 6) -> Context:
    if embed not in ("call", "symbolic"):
        raise ValueError("embed must be 'call' or 'symbolic'")
    if embed == "symbolic":
        try:
            return Context(spec, m_term(spec, guard))
        except ExpansionGuardError:
            pass
    return Context(spec)


def jk_term(As: Sequence, Y, U=1) -> Term:
    """``U^(2^k) J_k(A_1..A_k, Y / U)``.

    For ``k <= 2`` the homogenised polynomial is expanded; larger ``k`` use
    the calls ``J<k>`` (when ``U = 1``) or ``JH<k>``."""
    k = len(As)
    As = [term(A) for A in As]
    Y, U = term(Y), term(U)
    if k > 2:
        if U == term(1):
            return Call(f"J{k}", (*As, Y))
        return Call(f"JH{k}", (*As, Y, U))
    J = jk_symbolic(k)
    names = [f"x{j}" for j in range(1, k + 1)]
    total: Term = term(0)
    for exps, c in J.term_items():
        env = dict(zip(J.variables, exps))
        factors = [c, power(Y, env.get("x", 0)), power(U, 2 ** k - env.get("x", 0))]
        factors += [power(A, env.get(n, 0)) for A, n in zip(As, names)]
        total = add(total, mul(*factors))
    return total


def nonneg_sum(x, y, z) -> Term:
    """``x^2 + y^2 + z^2 + z`` (ranges over exactly the nonnegative integers)."""
    return add(power(x, 2), power(y, 2), power(z, 2), z)


def tung(u, v) -> Term:
    """``(2u+1)(3v+1)`` (ranges over exactly the nonzero integers)."""
    return mul(add(mul(2, u), 1), add(mul(3, v), 1))


def _wrap(body: Formula) -> Formula:
    return Free(("a",), body)


# -- the master-polynomial conditions of each family ---------------------------------


def th11_D(c, s) -> Term:
    """``D(c, s) = (s - c^2)(s - c^2 - c)``."""
    r = sub(s, power(c, 2))
    return mul(r, sub(r, c))


def th13_P(sign: int, b, q, k: int) -> Term:
    """``P+`` (sign = +1) or ``P-`` (sign = -1) as a term."""
    m = sub(mul(4, q), 1)
    return sub(power(sub(m, power(add(b, sign), k)), 2), power(sub(m, power(b, k)), 2))


def th13_P_bound(q, k: int) -> Term:
    """``2 (16 q^2 + 1 + (8 q^2 + 2)^k)^2 >= |P+-(b, q)|`` for ``0 <= b <= 8q^2 + 1``."""
    q2 = power(q, 2)
    return mul(2, power(add(mul(16, q2), 1, power(add(mul(8, q2), 2), k)), 2))


def th13_k(spec: ReductionSpec) -> int:
    return 4 * spec.n


# -- the builders --------------------------------------------------------------------


def _build_square_kinds(ctx: Context, kind: str) -> Formula:
    b2 = add(power("b", 2), 2)
    M = ctx.M(b2, "c", "t")
    if kind == "E2A1E3":
        return prenex(
            [("exists", "b"), ("exists", "c"), ("forall", "t"), ("exists", "x"), ("exists", "y"), ("exists", "z")],
            eq0(sub(M, nonneg_sum("x", "y", "z"))),
        )
    if kind == "E2A3E2":
        inner = gadgets.combine_conjunction([M])
        return prenex([("exists", "b"), ("exists", "c"), ("forall", "t")], inner)
    if kind == "A2E4":
        return prenex(
            [("forall", "b"), ("forall", "c"), ("exists", "t"), ("exists", "x"), ("exists", "y"), ("exists", "z")],
            eq0(sub(sub(neg(M), 1), nonneg_sum("x", "y", "z"))),
        )
    if kind == "A2E1A2E2":
        inner = gadgets.combine_conjunction([sub(neg(M), 1)])
        return prenex([("forall", "b"), ("forall", "c"), ("exists", "t")], inner)
    # The s-variant: b := s - c^2 with c pinned to floor(sqrt(s)) by D(c, s) <= 0.
    Ms = ctx.M(add(power(sub("s", power("c", 2)), 2), 2), "c", "t")
    if kind in ("E1A1E1A2E2", "E1A1E1A2E2_bounded"):
        inner = gadgets.combine_conjunction(["c", neg(th11_D("c", "s")), Ms])
        # The window for c is widened to [-s^2, R(a, s)], valid as s >= c^2 >= c >= 0.
        bound = (neg(power("s", 2)), ctx.R("s")) if kind.endswith("_bounded") else None
        return prenex([("exists", "s"), ("forall", "t", bound), ("exists", "c")], inner)
    if kind == "A1E1A1E3":
        inner = gadgets.combine_disjunction(
            [sub(neg("c"), 1), sub(th11_D("c", "s"), 1), sub(neg(Ms), 1)]
        )
        return prenex([("forall", "s"), ("exists", "t"), ("forall", "c")], inner)
    raise KeyError(kind)


def _divisor_parts(ctx: Context):
    A = sub("s", power("c", 2))  # must be a square
    S = add(mul(4, A), 3)  # must divide T
    T = add("c", 1)
    M = ctx.M(S, T, "t")
    pos = mul(power(T, 2), add(M, 1))  # must be positive
    return A, S, T, pos


def _build_divisor_kinds(ctx: Context, kind: str) -> Formula:
    A, S, T, R = _divisor_parts(ctx)
    if kind in ("E1A1E4", "E1A1E4_bounded"):
        # Relation combining with k = 1, W = 1 + A^2 and n = x^2 + y^2 + z^2 + z >= 0.
        U = mul(power(S, 2), sub(1, mul(2, R)))
        W = add(1, power(A, 2))
        n = nonneg_sum("x", "y", "z")
        T2 = power(T, 2)
        Y = add(mul(U, add(T2, W)), mul(power(S, 2), n), T2)
        matrix = eq0(jk_term([A], Y, U))
        bound = None
        if kind.endswith("_bounded"):
            s1 = add("s", 1)
            bound = (neg(power(s1, 2)), ctx.R(s1))
        return prenex(
            [("exists", "s"), ("forall", "t", bound), ("exists", "c"), ("exists", "x"), ("exists", "y"), ("exists", "z")],
            matrix,
        )
    if kind == "A1E1A3E2":
        # (4C + 2) d^2 + 1 with C = R - 1 is a square for some d != 0 iff R > 0.
        A2 = add(mul(sub(mul(4, R), 2), power("d", 2)), 1)
        P = jk_term([A, A2], add(mul(S, "x"), T), S)
        matrix = eq0(mul("d", sub(P, tung("y", "z"))))
        return prenex(
            [("forall", "s"), ("exists", "t"), ("forall", "c"), ("forall", "d"), ("forall", "x"), ("exists", "y"), ("exists", "z")],
            matrix,
        )
    raise KeyError(kind)


def _build_power_kinds(ctx: Context, kind: str) -> Formula:
    k = th13_k(ctx.spec)
    b, q, t = "b", "q", "t"
    M = ctx.M(add(power(b, 2), 4), sub(mul(4, q), power(b, k)), t)
    Pp, Pm = th13_P(+1, b, q, k), th13_P(-1, b, q, k)
    Cs = [neg(Pp), neg(Pm), M]
    m2 = add(power(sub(mul(4, q), 1), 2), 1)
    b_bound = (0, add(mul(8, power(q, 2)), 1))
    t_bound = (neg(power(m2, 2)), ctx.R(m2))
    bounded = kind.endswith("_bounded")
    outer = [("exists", q), ("forall", b, b_bound if bounded else None), ("forall", t, t_bound if bounded else None)]
    if kind in ("E1A2E3", "E1A2E3_bounded"):
        return prenex(outer, gadgets.combine_disjunction(Cs))
    if kind == "E1A6E2":
        return prenex(outer, lemma51_disjunction(Cs))
    if kind == "E1A5E2_bounded":
        # |C| <= C^2 for integers, so C_i^2 is an admissible bound for x_i.
        Ds = [power(C, 2) for C in Cs]
        return prenex(outer, lemma51_disjunction(Cs, Ds))
    if kind == "A1E2A2E2":
        inner = gadgets.combine_conjunction([sub(Pp, 1), sub(Pm, 1), sub(neg(M), 1)])
        return prenex([("forall", q), ("exists", b), ("exists", t)], inner)
    if kind == "A1E7":
        xs = [f"x{i}" for i in range(1, 6)]
        ext = Call(EXTERNAL_MARKER, (sub(Pp, 1), sub(Pm, 1), sub(neg(M), 1), *map(term, xs)))
        return prenex([("forall", q), ("exists", b), ("exists", t), *[("exists", x) for x in xs]], eq0(ext))
    raise KeyError(kind)


def build_repr(kind: str, spec: ReductionSpec, embed: str = "call", guard: int = 10 ** 6) -> Formula:
    """The representation of the given prefix kind, with free parameter ``a``."""
    ctx = make_context(spec, embed, guard)
    if kind in ("E2A1E3", "E2A3E2", "E1A1E1A2E2", "E1A1E1A2E2_bounded", "A2E4", "A1E1A1E3", "A2E1A2E2"):
        body = _build_square_kinds(ctx, kind)
    elif kind in ("E1A1E4", "E1A1E4_bounded", "A1E1A3E2"):
        body = _build_divisor_kinds(ctx, kind)
    elif kind in ("E1A2E3", "E1A2E3_bounded", "E1A6E2", "E1A5E2_bounded", "A1E2A2E2", "A1E7"):
        body = _build_power_kinds(ctx, kind)
    else:
        raise ValueError(f"unknown representation kind {kind!r}")
    return _wrap(body)


# -- disjunction through universals -----------------------------------------------------


def lemma51_disjunction(Cs, Ds=None, names=None) -> Formula:
    """``C_1 >= 0 or ... or C_n >= 0`` with a universal block then two existentials.

    Unbounded: ``forall x_1..x_n forall x exists y z
    (x_1...x_n (J_n(1 - (4C_i+2) x_i^2, x) - (2y+1)(3z+1)) = 0)``.
    Bounded (``|C_i| <= D_i``): ``forall x_i in [0, D_i] exists y z
    (sum (x_i + C_i + 1)^2 = (2y+1)(3z+1))``."""
    Cs = [term(c) for c in Cs]
    if not Cs:
        raise ValueError("need at least one C_i")
    n = len(Cs)
    used = set().union(*(c.free_vars() for c in Cs))
    if Ds is not None:
        Ds = [term(d) for d in Ds]
        if len(Ds) != n:
            raise ValueError("need one D_i per C_i")
        used |= set().union(*(d.free_vars() for d in Ds))
    bases = names or [*(f"x{i}" for i in range(1, n + 1)), "x", "y", "z"]
    fresh = []
    for base in bases:
        v = gadgets.fresh(base, used)
        used.add(v)
        fresh.append(v)
    xs, x, y, z = fresh[:n], fresh[n], fresh[n + 1], fresh[n + 2]
    if Ds is None:
        As = [sub(1, mul(add(mul(4, c), 2), power(xi, 2))) for c, xi in zip(Cs, xs)]
        matrix = eq0(mul(*xs, sub(jk_term(As, x), tung(y, z))))
        return prenex([*(("forall", v) for v in xs), ("forall", x), ("exists", y), ("exists", z)], matrix)
    total = add(*(power(add(xi, c, 1), 2) for xi, c in zip(xs, Cs)))
    matrix = eq0(sub(total, tung(y, z)))
    return prenex(
        [*(("forall", v, (0, d)) for v, d in zip(xs, Ds)), ("exists", y), ("exists", z)], matrix
    )


# -- number-theoretic side conditions -------------------------------------------------


def th11_floor_sqrt_claim(s: int) -> int | None:
    """The ``c >= 0`` with ``D(c, s) <= 0``; it is unique and equals ``isqrt(s)``.

    ``D(c, s) <= 0`` means ``c^2 <= s <= c^2 + c``, so no such ``c`` exists
    when ``s - isqrt(s)^2 > isqrt(s)``."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    c = math.isqrt(s)
    return c if (s - c * c) * (s - c * c - c) <= 0 else None


def th12_unique_sign(s: int) -> int | None:
    """The ``c`` in ``{isqrt(s), -isqrt(s)}`` with ``4(s - c^2) + 3 | c + 1``."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    r = math.isqrt(s)
    mod = 4 * (s - r * r) + 3
    hits = [c for c in sorted({r, -r}) if (c + 1) % mod == 0]
    if len(hits) > 1:  # pragma: no cover - excluded by the parity argument
        raise AssertionError(f"two candidates for s = {s}")
    return hits[0] if hits else None


def th13_pm(b: int, q: int, k: int) -> tuple[int, int]:
    if k <= 0 or k % 2:
        raise ValueError("k must be a positive even integer")
    m = 4 * q - 1
    here = (m - b ** k) ** 2
    return (m - (b + 1) ** k) ** 2 - here, (m - (b - 1) ** k) ** 2 - here


def th13_forward(spec: ReductionSpec, b0: int, c: int) -> dict:
    """The ``q = (b0^k + c) / 4`` step: returns the derived quantities."""
    k = th13_k(spec)
    num = b0 ** k + c
    if num % 4:
        raise ValueError("b0^k + c is not divisible by 4")
    q = num // 4
    return {"k": k, "q": q, "m": 4 * q - 1, "P": th13_pm(b0, q, k), "c_back": 4 * q - b0 ** k}


# -- function implementations -------------------------------------------------------------


def default_funcs(spec: ReductionSpec | None = None) -> dict[str, Callable[..., int]]:
    funcs: dict[str, Callable[..., int]] = {}
    for k in range(1, 5):
        funcs[f"J{k}"] = lambda *args, k=k: jk_homogeneous_value(args[:k], args[k], 1)
        funcs[f"JH{k}"] = lambda *args, k=k: jk_homogeneous_value(args[:k], args[k], args[k + 1])
    if spec is not None:
        funcs["M"] = lambda a, b, c, t: m_value(spec, a, b, c, t)
        funcs["Mbound"] = lambda a, b, c, T: m_bound(spec, a, b, c, T)
    return funcs


def reachable_calls(f) -> set[str]:
    """Names of all functions called anywhere in a formula."""
    from . import logic

    names: set[str] = set()

    def walk_t(t):
        if isinstance(t, logic.Call):
            names.add(t.name)
            for u in t.args:
                walk_t(u)
        elif isinstance(t, (logic.Add, logic.Mul)):
            for u in t.items:
                walk_t(u)
        elif isinstance(t, logic.Pow):
            walk_t(t.base)

    def walk_f(g):
        if isinstance(g, logic.Rel):
            walk_t(g.term)
        elif isinstance(g, (logic.Not, logic.Free)):
            walk_f(g.body)
        elif isinstance(g, (logic.And, logic.Or)):
            for h in g.items:
                walk_f(h)
        elif isinstance(g, logic.Quant):
            if g.bound:
                walk_t(g.bound[0])
                walk_t(g.bound[1])
            walk_f(g.body)

    walk_f(f)
    return names
