"""Elementary sign, nonzero and divisibility gadgets.

* ``C >= 0`` iff ``C = x^2 + y^2 + z^2 + z`` for some integers (three squares).
* ``C >= 0`` iff ``(4C+2) x^2 + 1`` is a square for some ``x != 0`` (Pell).
* ``C != 0`` iff ``C = (2u+1)(3v+1)`` for some integers.

Also the nearest even power used to pin a variable, and a search-based check
of the three-variable representation of odd non-(3 mod 4)-primes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import logic
from .logic import Term, add, eq0, exists, forall, mul, power, prenex, sub, term
from .polyring import iroot, is_square


@dataclass(frozen=True)
class GadgetWitness:
    kind: str  # "three_squares", "pell" or "tung"
    values: tuple

    def check(self, C: int) -> bool:
        if self.kind == "three_squares":
            x, y, z = self.values
            return C == x * x + y * y + z * z + z
        if self.kind == "pell":
            (x,) = self.values
            return x != 0 and is_square((4 * C + 2) * x * x + 1)
        if self.kind == "tung":
            u, v = self.values
            return C == (2 * u + 1) * (3 * v + 1)
        raise ValueError(f"unknown witness kind {self.kind!r}")


# -- sign and nonzero gadgets ------------------------------------------------------


def three_squares_witness(C: int) -> tuple[int, int, int] | None:
    """Some ``(x, y, z)`` with ``C = x^2 + y^2 + z^2 + z``, or None when C < 0.

    Equivalent to writing ``4C+1`` as ``(2x)^2 + (2y)^2 + (2z+1)^2``, which is
    possible for every C >= 0 since ``4C+1`` is not of the form ``4^a(8b+7)``.
    """
    if C < 0:
        return None
    top = math.isqrt(4 * C + 1) // 2
    for x in range(top + 1):
        rx = C - x * x
        if rx < 0:
            break
        for y in range(min(x, math.isqrt(rx)) + 1):
            r = rx - y * y
            # z^2 + z = r  <=>  (2z+1)^2 = 4r+1
            s = math.isqrt(4 * r + 1)
            if s * s == 4 * r + 1:
                return (x, y, (s - 1) // 2)
    raise AssertionError(f"no three-squares witness for {C}")  # pragma: no cover


def pell_fundamental(D: int) -> tuple[int, int]:
    """Least ``(x, y)`` with ``y >= 1`` and ``x^2 - D y^2 = 1``.

    Uses the periodic continued fraction of ``sqrt(D)``: the convergent just
    before the end of the first period (or second, for odd period) solves it.
    """
    if D < 2 or is_square(D):
        raise ValueError("D must be a nonsquare integer >= 2")
    a0 = math.isqrt(D)
    m, d, a = 0, 1, a0
    p_prev, p = 1, a0
    q_prev, q = 0, 1
    while p * p - D * q * q != 1:
        m = d * a - m
        d = (D - m * m) // d
        a = (a0 + m) // d
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    return p, q


def pell_nonneg_witness(C: int) -> int | None:
    """Some ``x != 0`` with ``(4C+2) x^2 + 1`` a square, or None when C < 0."""
    if C < 0:
        return None
    return pell_fundamental(4 * C + 2)[1]


def pell_negative_scan(C: int, bound: int) -> bool:
    """True when no ``0 < |x| <= bound`` makes ``(4C+2) x^2 + 1`` a square."""
    return not any(is_square((4 * C + 2) * x * x + 1) for x in range(1, bound + 1))


def tung_nonzero_witness(C: int) -> tuple[int, int]:
    """``(u, v)`` with ``C = (2u+1)(3v+1)``; exists iff C != 0."""
    if C == 0:
        raise ValueError("zero has no (2u+1)(3v+1) factorisation")
    a, rest = 0, C
    while rest % 3 == 0:
        rest //= 3
        a += 1
    s = 1 if rest % 3 == 1 else -1
    u = (s * 3 ** a - 1) // 2
    v = (s * rest - 1) // 3
    return u, v


# -- combinators --------------------------------------------------------------


def fresh(base: str, used: Iterable[str]) -> str:
    used = set(used)
    if base not in used:
        return base
    i = 1
    while f"{base}_{i}" in used:
        i += 1
    return f"{base}_{i}"


def _fresh_names(bases: Sequence[str], terms: Sequence[Term], extra: Iterable[str] = ()):
    used = set(extra).union(*(t.free_vars() for t in terms))
    names = []
    for b in bases:
        n = fresh(b, used)
        used.add(n)
        names.append(n)
    return names


def _terms(Cs) -> list[Term]:
    Cs = [term(c) for c in Cs]
    if not Cs:
        raise ValueError("need at least one C_i")
    return Cs


def disjunction_matrix(Cs, u: str, v: str, w: str) -> Term:
    """``prod_i (2(2C_i+1)(2u+1)^2(3v+1)^2 - w^2 + 1)``."""
    uv2 = power(mul(add(mul(2, u), 1), add(mul(3, v), 1)), 2)
    return mul(*(add(mul(2, add(mul(2, c), 1), uv2), mul(-1, power(w, 2)), 1) for c in Cs))


def combine_disjunction(Cs, names: Sequence[str] = ("u", "v", "w")) -> logic.Formula:
    """``C_1 >= 0 or ... or C_n >= 0`` as ``exists u v w (product = 0)``."""
    Cs = _terms(Cs)
    u, v, w = _fresh_names(names, Cs)
    return prenex([("exists", u), ("exists", v), ("exists", w)], eq0(disjunction_matrix(Cs, u, v, w)))


def conjunction_matrix(Cs, x: str, y: str, u: str, v: str) -> Term:
    """``x (prod_i ((4C_i+2) x^2 + y^2 - 1) - (2u+1)(3v+1))``."""
    prod = mul(*(add(mul(add(mul(4, c), 2), power(x, 2)), power(y, 2), -1) for c in Cs))
    return mul(x, sub(prod, mul(add(mul(2, u), 1), add(mul(3, v), 1))))


def combine_conjunction(Cs, names: Sequence[str] = ("x", "y", "u", "v")) -> logic.Formula:
    """``C_1 >= 0 and ... and C_n >= 0`` as ``forall x y exists u v (... = 0)``."""
    Cs = _terms(Cs)
    x, y, u, v = _fresh_names(names, Cs)
    return prenex(
        [("forall", x), ("forall", y), ("exists", u), ("exists", v)],
        eq0(conjunction_matrix(Cs, x, y, u, v)),
    )


def bounded_conjunction_matrix(Cs, x: str, y: str, z: str) -> Term:
    """``prod_i (x + C_i + 1) - (2y+1)(3z+1)``."""
    prod = mul(*(add(x, c, 1) for c in Cs))
    return sub(prod, mul(add(mul(2, y), 1), add(mul(3, z), 1)))


def combine_conjunction_bounded(Cs, Ds, names: Sequence[str] = ("x", "y", "z")) -> logic.Formula:
    """With ``|C_i| <= D_i``: ``forall x in [0, D_1...D_n] exists y z (...)``.

    ``Ds`` may be ints or terms; when both ``C_i`` and ``D_i`` are constants
    the hypothesis ``|C_i| <= D_i`` is checked here."""
    Cs = _terms(Cs)
    Ds = [term(d) for d in Ds]
    if len(Ds) != len(Cs):
        raise ValueError("need one D_i per C_i")
    for c, d in zip(Cs, Ds):
        if d.free_vars():
            continue
        dv = logic.eval_term(d, {})
        if dv <= 0:
            raise ValueError("D_i must be positive")
        if not c.free_vars() and abs(logic.eval_term(c, {})) > dv:
            raise ValueError("|C_i| <= D_i fails")
    x, y, z = _fresh_names(names, Cs + Ds)
    return prenex(
        [("forall", x, (0, mul(*Ds))), ("exists", y), ("exists", z)],
        eq0(bounded_conjunction_matrix(Cs, x, y, z)),
    )


# -- nearest even power -------------------------------------------------------


def _check_power_args(m: int, k: int):
    if k <= 0 or k % 2:
        raise ValueError("k must be a positive even integer")
    if m % 4 != 3:
        raise ValueError("m must be congruent to 3 mod 4")


def nearest_power(m: int, k: int) -> int:
    """The unique ``b >= 0`` minimising ``|m - b^k|`` (k even, m = 3 mod 4)."""
    _check_power_args(m, k)
    if m <= 0:
        return 0
    lo = iroot(m, k)
    hi = lo + 1
    return lo if m - lo ** k < hi ** k - m else hi


def local_min_criterion(b: int, m: int, k: int) -> bool:
    """``|m - b^k| < |m - (b+1)^k|`` and ``|m - b^k| < |m - (b-1)^k|``."""
    _check_power_args(m, k)
    here = abs(m - b ** k)
    return here < abs(m - (b + 1) ** k) and here < abs(m - (b - 1) ** k)


# -- three-variable representation ------------------------------------------------


def oh_sun_witness(a: int) -> tuple[int, int, int] | None:
    """``(x, y, z)`` with ``a^2 = (2x+1)^2 + 8(2y+1)^2 + 8(2z+1)^2``, if any.

    Sign changes of the odd numbers are irrelevant, so only nonnegative
    ``x, y, z`` with ``2y+1 <= 2z+1`` are searched."""
    if a < 0:
        raise ValueError("a must be nonnegative")
    target = a * a
    Y = 1
    while 16 * Y * Y < target:
        Z = Y
        while 8 * Y * Y + 8 * Z * Z < target:
            rest = target - 8 * Y * Y - 8 * Z * Z
            X = math.isqrt(rest)
            if X * X == rest and X % 2 == 1:
                return ((X - 1) // 2, (Y - 1) // 2, (Z - 1) // 2)
            Z += 2
        Y += 2
    return None


def oh_sun_member(a: int) -> bool:
    return oh_sun_witness(a) is not None


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def in_oh_sun_set(a: int) -> bool:
    """Direct definition: odd, at least 3, and not a prime congruent to 3 mod 4."""
    return a >= 3 and a % 2 == 1 and not (a % 4 == 3 and is_prime(a))
