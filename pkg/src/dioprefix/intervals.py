"""Digit encodings, rational interval systems and coefficient extraction.

Three equivalences drive the reduction machinery:

* A number ``c`` has the form ``sum z_i B^(n_i)`` with digits ``0 <= z_i < b``
  exactly when a short list of rational intervals built from ``c`` each
  contain an integer (``digit_intervals``).
* A family of intervals of width at most one all contain integers exactly when
  a product of linear factors in ``t`` is nonnegative for every integer ``t``.
* For a polynomial ``P`` with bounded coefficients, ``P(z) = 0`` exactly when
  one further interval, computed from ``C(B) D(B)``, contains an integer.

All endpoints are ``fractions.Fraction`` values and containment is decided by
exact ceiling and floor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from .polyring import Poly, UniPoly, rat_str


# -- digit encodings -----------------------------------------------------------


@dataclass(frozen=True)
class DigitSpec:
    b: int
    B: int
    n: tuple

    def __post_init__(self):
        object.__setattr__(self, "n", tuple(int(x) for x in self.n))
        if self.b < 1:
            raise ValueError("digit bound b must be positive")
        if self.B < self.b:
            raise ValueError("base B must be at least b")
        if not self.n:
            raise ValueError("need at least one exponent")
        if self.n[0] <= 0:
            raise ValueError("exponents must be positive")
        if any(x >= y for x, y in zip(self.n, self.n[1:])):
            raise ValueError("exponents must be strictly increasing")

    @property
    def nu(self) -> int:
        return len(self.n) - 1


def digit_encode(z: Sequence[int], spec: DigitSpec) -> int:
    if len(z) != len(spec.n):
        raise ValueError(f"expected {len(spec.n)} digits")
    if any(not 0 <= d < spec.b for d in z):
        raise ValueError("digit out of range")
    return sum(d * spec.B ** e for d, e in zip(z, spec.n))


def digit_decode(c: int, spec: DigitSpec) -> list[int] | None:
    """The digit vector of ``c``, or None when ``c`` has no such form."""
    if c < 0 or c >= spec.b * spec.B ** spec.n[-1]:
        return None
    if spec.B == 1:
        # Then b = 1 as well and every digit is forced to be zero.
        return [0] * len(spec.n) if c == 0 else None
    digits = {}
    k, rest = 0, c
    while rest:
        rest, digits[k] = divmod(rest, spec.B)
        k += 1
    positions = set(spec.n)
    if any(d and k not in positions for k, d in digits.items()):
        return None
    z = [digits.get(e, 0) for e in spec.n]
    if any(d >= spec.b for d in z):
        return None
    return z


# -- interval systems ---------------------------------------------------------


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class IntervalSystem:
    pairs: tuple

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple((_frac(s), _frac(t)) for s, t in self.pairs))

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    @property
    def sigmas(self) -> tuple:
        return tuple(s for s, _ in self.pairs)

    @property
    def taus(self) -> tuple:
        return tuple(t for _, t in self.pairs)

    def unit_width(self) -> bool:
        return all(0 <= t - s <= 1 for s, t in self.pairs)

    def __str__(self):
        return " ".join(f"[{rat_str(s)}, {rat_str(t)}]" for s, t in self.pairs)


def interval_has_integer(sigma: Fraction, tau: Fraction) -> bool:
    return math.ceil(sigma) <= math.floor(tau)


def contains_integer(sys) -> bool:
    """True iff every interval ``[sigma, tau]`` holds an integer."""
    return all(interval_has_integer(s, t) for s, t in sys)


def digit_intervals(c: int, spec: DigitSpec) -> IntervalSystem:
    """The ``nu + 2`` intervals characterising digit form."""
    b, B, n = spec.b, spec.B, spec.n
    pairs = [(Fraction(c, B ** n[0]), Fraction(c, B ** n[0]))]
    for i in range(1, len(n)):
        pairs.append((Fraction(c + 1 - b * B ** n[i - 1], B ** n[i]), Fraction(c, B ** n[i])))
    top = (b * b + c * c) * B ** n[-1]
    pairs.append((Fraction(c + 1 - b * B ** n[-1], top), Fraction(c, top)))
    return IntervalSystem(tuple(pairs))


# -- intervals as a product inequality ----------------------------------------------


def _tau_gap(sys) -> Fraction | None:
    taus = [t for _, t in sys]
    if len(taus) < 2:
        return None
    return max(x - y for x, y in zip(taus, taus[1:]))


def lemma22_min_W(sys) -> int:
    """Least integer ``W >= 1`` with ``W >= 1 + max(tau_i - tau_(i+1))``."""
    gap = _tau_gap(sys)
    if gap is None:
        return 1
    return max(1, math.ceil(1 + gap))


def lemma22_W_ok(sys, W: int) -> bool:
    gap = _tau_gap(sys)
    return gap is None or W >= 1 + gap


def _check22(sys, W: int):
    if not sys.unit_width():
        raise ValueError("each interval must satisfy 0 <= tau - sigma <= 1")
    if not lemma22_W_ok(sys, W):
        raise ValueError("W is below 1 + max(tau_i - tau_(i+1))")


def lemma22_product_value(sys, W: int, t: int) -> Fraction:
    """``prod_i (t - sigma_i - iW)(t + 1 - tau_i - iW)``."""
    _check22(sys, W)
    value = Fraction(1)
    for i, (s, tau) in enumerate(sys):
        value *= (t - s - i * W) * (t + 1 - tau - i * W)
    return value


def lemma22_holds_all_t(sys, W: int) -> bool:
    """Whether the product is nonnegative for all integers ``t``.

    Decided through the equivalence with integer containment, never by
    enumerating ``t``."""
    _check22(sys, W)
    return contains_integer(sys)


def lemma22_scan_window(sys, W: int) -> range:
    """Integers ``t`` outside of which the product is always nonnegative (with margin)."""
    k = len(sys) - 1
    lo = math.floor(sys.pairs[0][1]) - 2
    hi = math.ceil(sys.pairs[-1][1]) + k * W + 2
    return range(lo, hi + 1)


def lemma22_scan(sys, W: int) -> bool:
    """Oracle: nonnegativity of the product on the whole critical window."""
    return all(lemma22_product_value(sys, W, t) >= 0 for t in lemma22_scan_window(sys, W))


# -- coefficient extraction ---------------------------------------------------------


@dataclass(frozen=True)
class Lemma23Instance:
    """``P(z_0..z_nu) = sum a_I z^I`` with ``|I| <= delta`` and ``|a_I| <= L``."""

    coeffs: Mapping
    delta: int
    nu: int
    L: int
    z: tuple
    _items: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        items = tuple(sorted((tuple(k), int(v)) for k, v in dict(self.coeffs).items() if v))
        object.__setattr__(self, "_items", items)
        object.__setattr__(self, "z", tuple(int(x) for x in self.z))
        if self.delta < 1 or self.L < 1:
            raise ValueError("delta and L must be positive")
        if len(self.z) != self.nu + 1:
            raise ValueError("need nu + 1 evaluation values")
        if any(x < 0 for x in self.z):
            raise ValueError("evaluation values must be nonnegative")
        for idx, a in items:
            if len(idx) != self.nu + 1 or any(i < 0 for i in idx):
                raise ValueError(f"bad exponent tuple {idx}")
            if sum(idx) > self.delta:
                raise ValueError("a monomial exceeds degree delta")
            if abs(a) > self.L:
                raise ValueError("a coefficient exceeds L")

    @classmethod
    def from_poly(cls, P: Poly, names: Sequence[str], z, delta=None, L=None):
        """Build an instance from a Poly in the variables ``names``."""
        extra = set(P.variables) - set(names)
        if extra:
            raise ValueError(f"unexpected variables {sorted(extra)}")
        coeffs = {}
        for idx, c in P.coefficients_in(names).items():
            coeffs[idx] = c.constant_term()
        if delta is None:
            delta = max(1, P.degree(names))
        if L is None:
            L = max([1, *(abs(v) for v in coeffs.values())])
        return cls(coeffs, delta, len(names) - 1, L, tuple(z))

    @property
    def N(self) -> int:
        return (self.delta + 1) ** (self.nu + 1)

    def items(self):
        return self._items

    def P_value(self) -> int:
        return sum(a * math.prod(x ** i for x, i in zip(self.z, idx)) for idx, a in self._items)


def _d_weight(idx, delta: int) -> int:
    return math.prod(math.factorial(i) for i in idx) * math.factorial(delta - sum(idx))


def lemma23_build(inst: Lemma23Instance) -> tuple[UniPoly, UniPoly, int]:
    """``C(x)``, ``D(x)`` and the strict lower bound on admissible bases."""
    d, N = inst.delta, inst.N
    base = [0] * (d * (d + 1) ** inst.nu + 1)
    base[0] = 1
    for i, zi in enumerate(inst.z):
        base[(d + 1) ** i] += zi
    C = UniPoly(base) ** d
    dco = [0] * (N + 1)
    for idx, a in inst.items():
        e = N - sum(i * (d + 1) ** j for j, i in enumerate(idx))
        dco[e] += _d_weight(idx, d) * a
    D = UniPoly(dco)
    threshold = 2 * (1 + sum(inst.z)) ** d * math.factorial(d) * inst.L
    return C, D, threshold


def lemma23_interval(inst: Lemma23Instance, B: int) -> tuple[Fraction, Fraction]:
    C, D, threshold = lemma23_build(inst)
    if B <= threshold:
        raise ValueError(f"B must exceed {threshold}")
    N = inst.N
    cd2 = 2 * C(B) * D(B)
    den = 2 * B ** (N + 1)
    return Fraction(cd2 - B ** N, den), Fraction(cd2 + B ** N, den)


def lemma23_zero_iff(inst: Lemma23Instance, B: int) -> bool:
    """Decide ``P(z) = 0`` by the integer-in-interval condition at base ``B``."""
    return interval_has_integer(*lemma23_interval(inst, B))


def lemma23_z_witness(inst: Lemma23Instance, B: int) -> int | None:
    """The integer in the interval built from the high coefficients of ``C D``."""
    lo, hi = lemma23_interval(inst, B)
    C, D, _ = lemma23_build(inst)
    r = (C * D).coeffs
    N = inst.N
    z = sum(r[k] * B ** (k - 1 - N) for k in range(N + 1, len(r)))
    return z if lo <= z <= hi else None


def lemma23_symbolic_coefficient(inst: Lemma23Instance, names: Sequence[str] | None = None) -> Poly:
    """Coefficient of ``x^N`` in ``C(x) D(x)`` with the ``z_i`` kept symbolic."""
    d, N = inst.delta, inst.N
    names = list(names or [f"z{i}" for i in range(inst.nu + 1)])
    x = Poly.var("x_")
    C = (1 + sum((Poly.var(n) * x ** ((d + 1) ** i) for i, n in enumerate(names)), Poly())) ** d
    D = Poly()
    for idx, a in inst.items():
        e = N - sum(i * (d + 1) ** j for j, i in enumerate(idx))
        D = D + _d_weight(idx, d) * a * x ** e
    return (C * D).coefficients_in(["x_"]).get((N,), Poly())


def lemma23_poly(inst: Lemma23Instance, names: Sequence[str] | None = None) -> Poly:
    names = list(names or [f"z{i}" for i in range(inst.nu + 1)])
    return Poly.from_terms(
        {tuple((n, i) for n, i in zip(names, idx) if i): a for idx, a in inst.items()}
    )


def all_exponent_tuples(nu: int, delta: int):
    for idx in product(range(delta + 1), repeat=nu + 1):
        if sum(idx) <= delta:
            yield idx
