"""Brute-force reference implementations.

Each function here decides a property by enumeration or by the textbook
definition, sharing no code path with the module it checks.  They are slow on
purpose and only meant for small inputs.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product
from typing import Sequence


def square(n: int) -> bool:
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


def digit_form(c: int, b: int, B: int, n: Sequence[int]) -> bool:
    """Whether ``c = sum z_i B^(n_i)`` for some digits ``0 <= z_i < b``."""
    return any(
        c == sum(z * B ** e for z, e in zip(zs, n)) for zs in product(range(b), repeat=len(n))
    )


def product_scan(pairs, W: int, ts) -> bool:
    """Nonnegativity of ``prod (t - s_i - iW)(t + 1 - tau_i - iW)`` over ``ts``."""
    for t in ts:
        value = Fraction(1)
        for i, (s, tau) in enumerate(pairs):
            value *= (t - s - i * W) * (t + 1 - tau - i * W)
        if value < 0:
            return False
    return True


def interval_integers(pairs) -> bool:
    """Every interval holds an integer, found by walking from its left end."""
    for s, tau in pairs:
        k = math.floor(s)
        while k < s:
            k += 1
        if k > tau:
            return False
    return True


def pell_minimal(D: int, ymax: int = 10 ** 5) -> tuple[int, int] | None:
    for y in range(1, ymax + 1):
        x2 = 1 + D * y * y
        if square(x2):
            return math.isqrt(x2), y
    return None


def three_squares(C: int) -> bool:
    if C < 0:
        return False
    r = math.isqrt(C) + 1
    return any(
        x * x + y * y + z * z + z == C
        for x in range(r + 1)
        for y in range(r + 1)
        for z in range(-r - 1, r + 1)
    )


def nearest_scan(m: int, k: int, lo: int = -30, hi: int = 30) -> list[int]:
    """All ``b`` in ``[lo, hi]`` minimising ``|m - b^k|``."""
    best = min(abs(m - b ** k) for b in range(lo, hi + 1))
    return [b for b in range(lo, hi + 1) if abs(m - b ** k) == best]


def oh_sun_scan(a: int) -> bool:
    """Search all sign patterns of odd ``X, Y, Z`` with ``|X|, |Y|, |Z| <= a``."""
    target = a * a
    odd = range(-a if a % 2 else -a + 1, a + 1, 2) if a > 0 else range(0)
    squares8 = {8 * y * y for y in odd}
    for X in odd:
        for Y in odd:
            rest = target - X * X - 8 * Y * Y
            if rest in squares8:
                return True
    return False


def odd_non_3mod4_prime(a: int) -> bool:
    if a < 3 or a % 2 == 0:
        return False
    if a % 4 == 3 and all(a % d for d in range(2, math.isqrt(a) + 1)):
        return False
    return True


def combine_condition(A, R: int, S: int, T: int) -> bool:
    return all(square(x) for x in A) and S != 0 and T % S == 0 and R > 0


def uni_has_integer_root(coeffs, bound: int | None = None) -> bool:
    """Integer roots of a univariate polynomial by scanning up to the Cauchy bound."""
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        return True
    if coeffs[0] == 0:
        return True
    lead = abs(coeffs[-1])
    if bound is None:
        bound = 1 + max(abs(c) for c in coeffs[:-1]) // lead if len(coeffs) > 1 else 0
    for x in range(-bound, bound + 1):
        v = 0
        for c in reversed(coeffs):
            v = v * x + c
        if v == 0:
            return True
    return False
