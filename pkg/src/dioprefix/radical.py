"""The Matiyasevich-Robinson polynomial J_k and the square/divisibility combiners.

J_k(x_1, ..., x_k, x) is the product over all sign vectors of
``x + e_1 sqrt(x_1) + e_2 sqrt(x_2) X + ... + e_k sqrt(x_k) X^(k-1)`` with
``X = 1 + x_1^2 + ... + x_k^2``.  It is expanded here in the multilinear ring
where each adjoined square root appears at most once per monomial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from .polyring import Poly, UniPoly, integer_roots

DEFAULT_ARITY_CAP = 4


class ArityCapError(ValueError):
    pass


def _is_zero(c) -> bool:
    if isinstance(c, int):
        return c == 0
    return c.is_zero()


class RadicalElem:
    """Element of ``Coeff[sqrt(r_1), ..., sqrt(r_k)]`` kept in multilinear form.

    ``components`` maps a frozenset of radical indices (0-based) to the
    coefficient of the product of those square roots.  Coefficients may be
    ints, ``Poly`` or ``UniPoly``; radicands must be multipliable with them.
    """

    __slots__ = ("components", "radicands")

    def __init__(self, components: dict, radicands: tuple):
        self.components = {s: c for s, c in components.items() if not _is_zero(c)}
        self.radicands = radicands

    @property
    def k(self) -> int:
        return len(self.radicands)

    def __mul__(self, other: "RadicalElem") -> "RadicalElem":
        out: dict = {}
        rad = self.radicands
        for s1, c1 in self.components.items():
            for s2, c2 in other.components.items():
                c = c1 * c2
                for j in s1 & s2:
                    c = c * rad[j]
                key = s1 ^ s2
                out[key] = out[key] + c if key in out else c
        return RadicalElem(out, rad)

    def rational_part(self):
        return self.components.get(frozenset(), 0)

    def is_rational(self) -> bool:
        return all(not s for s in self.components)


def linear_factor(lead, weights, signs, radicands) -> RadicalElem:
    comps = {frozenset(): lead}
    for j, (w, e) in enumerate(zip(weights, signs)):
        comps[frozenset((j,))] = w if e > 0 else -w
    return RadicalElem(comps, tuple(radicands))


def conjugate_product(lead, weights, radicands) -> RadicalElem:
    """Product of ``lead + sum_j e_j w_j sqrt(r_j)`` over every sign vector.

    Factors are multiplied as a balanced tree pairing conjugates in the first
    radical, then the second, and so on."""
    k = len(radicands)
    layer = [
        linear_factor(lead, weights, signs[::-1], radicands)
        for signs in product((1, -1), repeat=k)
    ]
    while len(layer) > 1:
        layer = [layer[i] * layer[i + 1] for i in range(0, len(layer), 2)]
    return layer[0]


def _check_arity(k: int, cap: int):
    if k < 1:
        raise ValueError("J_k needs k >= 1")
    if k > cap:
        raise ArityCapError(f"k = {k} exceeds the arity cap {cap}")


def jk_radical_product(k: int, cap: int = DEFAULT_ARITY_CAP) -> RadicalElem:
    """The defining conjugate product for J_k with radicands ``x1..xk``.

    The weight ``X = 1 + sum x_j^2`` is kept as the separate variable ``X``;
    substituting it afterwards is a ring map, so cancellation is unaffected."""
    _check_arity(k, cap)
    xs = [Poly.var(f"x{j}") for j in range(1, k + 1)]
    X = Poly.var("X")
    return conjugate_product(Poly.var("x"), [X ** j for j in range(k)], xs)


@lru_cache(maxsize=None)
def _jk_symbolic(k: int) -> Poly:
    prod_ = jk_radical_product(k, cap=k)
    if not prod_.is_rational():
        raise ArithmeticError("radical components failed to cancel")
    X = 1 + sum((Poly.var(f"x{j}") ** 2 for j in range(1, k + 1)), Poly())
    return prod_.rational_part().substitute("X", X)


def jk_symbolic(k: int, cap: int = DEFAULT_ARITY_CAP) -> Poly:
    """J_k as a Poly in ``x1, ..., xk, x``."""
    _check_arity(k, cap)
    return _jk_symbolic(k)


def _weights(A, scale):
    X = 1 + sum(a * a for a in A)
    return [scale * X ** j for j in range(len(A))]


def jk_eval(A, var: str = "x") -> UniPoly:
    """J_k(A_1, ..., A_k, x) as a univariate polynomial in ``x``."""
    A = tuple(int(a) for a in A)
    if not A:
        return UniPoly((0, 1), var)
    p = conjugate_product(UniPoly((0, 1), var), _weights(A, 1), A).rational_part()
    return p if isinstance(p, UniPoly) else UniPoly((p,), var)


def jk_homogeneous_value(A, Y: int, U: int) -> int:
    """``U^(2^k) * J_k(A, Y / U)``, an integer for all integer inputs."""
    A = tuple(int(a) for a in A)
    if not A:
        return Y
    return conjugate_product(Y, _weights(A, U), A).rational_part()


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def decide_squares(A) -> bool:
    """True iff J_k(A, x) has an integer root, i.e. every A_i is a square."""
    return bool(integer_roots(jk_eval(A)))


def jk_shifted(A, S: int, T: int, var: str = "x") -> UniPoly:
    """``S^(2^k) J_k(A, x + T/S)`` with integer coefficients.

    Each conjugate factor is multiplied by S before expansion, so no rational
    intermediate ever appears."""
    if S == 0:
        raise ZeroDivisionError("S must be nonzero")
    A = tuple(int(a) for a in A)
    p = conjugate_product(UniPoly((T, S), var), _weights(A, S), A).rational_part()
    return p if isinstance(p, UniPoly) else UniPoly((p,), var)


@dataclass(frozen=True)
class CombineInput:
    A: tuple
    R: int
    S: int
    T: int

    def __post_init__(self):
        object.__setattr__(self, "A", tuple(int(a) for a in self.A))

    @property
    def W(self) -> int:
        return 1 + sum(a * a for a in self.A)

    @property
    def k(self) -> int:
        return len(self.A)

    @property
    def scale(self) -> int:
        return self.S * self.S * (1 - 2 * self.R)


def relation_combine(inp: CombineInput, var: str = "n") -> UniPoly:
    """The relation-combining polynomial in ``n``.

    Some ``n >= 0`` is a root iff all A_i are squares, S | T and R > 0.
    One copy of ``S^2 (1 - 2R)`` is absorbed into each conjugate factor.
    """
    if inp.S == 0:
        raise ZeroDivisionError("S must be nonzero")
    S, T, U = inp.S, inp.T, inp.scale
    lead = UniPoly((U * (T * T + inp.W ** inp.k) + T * T, S * S), var)
    p = conjugate_product(lead, _weights(inp.A, U), inp.A).rational_part()
    return p if isinstance(p, UniPoly) else UniPoly((p,), var)


def combine_decide(inp: CombineInput) -> bool:
    """Decide the relation-combining condition from the integer roots of J_k(A, x)."""
    if inp.S == 0:
        raise ZeroDivisionError("S must be nonzero")
    S2, T2, U = inp.S * inp.S, inp.T * inp.T, inp.scale
    offset = T2 + inp.W ** inp.k
    for rho in integer_roots(jk_eval(inp.A)):
        num = U * (rho - offset) - T2
        if num % S2 == 0 and num // S2 >= 0:
            return True
    return False
