"""From a Diophantine polynomial to the master polynomial ``M(a, b, c, t)``.

Given ``P0(a, z1..z_nu)``, put ``P = (z0 - 1)^2 + P0^2`` and expand it as
``sum_I p_I(a) z^I``.  With ``L(a) = sum_I p_I(a)^2`` and
``B(a, b) = 2 (nu+1)^delta b^delta delta! L(a)`` the digits ``z0 = 1, z1..`` of a
solution in ``[0, b)`` are packed into ``c = sum z_i B^(n_i)``.  Membership then
becomes the statement that ``nu + 3`` rational intervals contain integers,
equivalently that the product ``Q(a, b, c, t)`` of linear factors in ``t`` is
nonnegative for every integer ``t``.

``Q`` and ``M = (b^2 - b)(Q + 1) - 1`` are evaluated factor by factor. Their
expansion as polynomials is available only behind a term-count guard.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .intervals import IntervalSystem, contains_integer, DigitSpec, digit_decode
from .polyring import Poly

Z_RE = re.compile(r"z([1-9][0-9]*)\Z")

DEFAULT_TERM_GUARD = 10 ** 6


class ExpansionGuardError(RuntimeError):
    pass


# -- infinite families ------------------------------------------------------------


FAMILIES = {
    "sq2": "squares plus 2: b^2 + 2, b >= 0",
    "4sq3": "4 m^2 + 3 (4b + 3 with b a square)",
    "evensq4": "(2x)^2 + 4",
}


@dataclass(frozen=True)
class SFamily:
    kind: str

    def __post_init__(self):
        if self.kind not in FAMILIES:
            raise ValueError(f"unknown family {self.kind!r}; choose from {sorted(FAMILIES)}")

    def _shape(self):
        # member = scale * m^2 + offset for m = 0, 1, 2, ...
        return {"sq2": (1, 2), "4sq3": (4, 3), "evensq4": (4, 4)}[self.kind]

    def member(self, m: int) -> int:
        scale, offset = self._shape()
        return scale * m * m + offset

    def contains(self, b: int) -> bool:
        scale, offset = self._shape()
        r = b - offset
        if r < 0 or r % scale:
            return False
        return math.isqrt(r // scale) ** 2 == r // scale

    def least_at_least(self, N: int) -> int:
        scale, offset = self._shape()
        if N <= offset:
            return offset
        m = math.isqrt((N - offset) // scale)
        while self.member(m) < N:
            m += 1
        return self.member(m)

    def members(self, count: int) -> list[int]:
        return [self.member(m) for m in range(count)]


# -- the specification ---------------------------------------------------------


@dataclass(frozen=True)
class ReductionSpec:
    P0: Poly
    nu: int
    family: SFamily
    P: Poly = field(compare=False)
    delta: int = field(compare=False)
    nj: tuple = field(compare=False)
    coeffs: tuple = field(compare=False)  # ((i_0..i_nu), p_I(a) as Poly)
    L: Poly = field(compare=False)
    k0: int = field(compare=False)
    k1: int = field(compare=False)
    k2: int = field(compare=False)
    n: int = field(compare=False)
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def z_names(self) -> list[str]:
        return [f"z{i}" for i in range(self.nu + 1)]

    def L_value(self, a: int) -> int:
        key = ("L", a)
        if key not in self._cache:
            self._cache[key] = self.L.eval({"a": a}) if self.L.variables else self.L.constant_term()
        return self._cache[key]

    def P0_value(self, a: int, z: Sequence[int]) -> int:
        env = {"a": a, **{f"z{i}": v for i, v in enumerate(z, start=1)}}
        return self.P0.eval({v: env[v] for v in self.P0.variables})


def _infer_nu(P0: Poly) -> int:
    nu = 0
    for v in P0.variables:
        if v == "a":
            continue
        m = Z_RE.match(v)
        if not m:
            raise ValueError(f"variable {v!r} is neither 'a' nor z1..z_nu")
        nu = max(nu, int(m.group(1)))
    return nu


def spec_build(P0: Poly, family: SFamily | str = "sq2", nu: int | None = None) -> ReductionSpec:
    if isinstance(family, str):
        family = SFamily(family)
    inferred = _infer_nu(P0)
    nu = inferred if nu is None else nu
    if nu < inferred:
        raise ValueError(f"nu = {nu} but P0 mentions z{inferred}")
    P = (Poly.var("z0") - 1) ** 2 + P0 ** 2
    names = [f"z{i}" for i in range(nu + 1)]
    deg = P.degree(names)
    delta = deg + (deg % 2)
    groups = P.coefficients_in(names)
    coeffs = tuple(sorted(groups.items()))
    L = sum((p * p for _, p in coeffs), Poly())
    nj = tuple((delta + 1) ** j for j in range(nu + 2))
    return ReductionSpec(
        P0=P0,
        nu=nu,
        family=family,
        P=P,
        delta=delta,
        nj=nj,
        coeffs=coeffs,
        L=L,
        k0=(nu + 3) * math.factorial(delta),
        k1=delta // 2,
        k2=2 * nu + 4,
        n=(delta + 1) * (nj[nu] + 1),
    )


# -- derived quantities ---------------------------------------------------------


def big_B(spec: ReductionSpec, a: int, b: int) -> int:
    d = spec.delta
    return 2 * (spec.nu + 1) ** d * b ** d * math.factorial(d) * spec.L_value(a)


def b_floor(spec: ReductionSpec, a: int) -> int:
    """``2 (nu+1)^delta delta! L(a)``: the family member must be at least this."""
    return 2 * (spec.nu + 1) ** spec.delta * math.factorial(spec.delta) * spec.L_value(a)


def _weight(idx, delta) -> int:
    return math.prod(math.factorial(i) for i in idx) * math.factorial(delta - sum(idx))


def big_D(spec: ReductionSpec, a: int, b: int) -> int:
    key = ("D", a, b)
    if key in spec._cache:
        return spec._cache[key]
    B = big_B(spec, a, b)
    top = spec.nj[-1]
    total = 0
    for idx, p in spec.coeffs:
        pa = p.eval({"a": a}) if p.variables else p.constant_term()
        e = top - sum(i * nj for i, nj in zip(idx, spec.nj))
        total += _weight(idx, spec.delta) * pa * B ** e
    spec._cache[key] = total
    return total


def interval_system(spec: ReductionSpec, a: int, b: int, c: int) -> IntervalSystem:
    if b < 2:
        raise ValueError("b must be at least 2")
    B = big_B(spec, a, b)
    nj, nu, d = spec.nj, spec.nu, spec.delta
    Bp = [B ** e for e in nj]
    pairs = [(Fraction(c, B), Fraction(c, B))]
    for i in range(1, nu + 1):
        pairs.append((Fraction(c + 1 - b * Bp[i - 1], Bp[i]), Fraction(c, Bp[i])))
    top = (b * b + c * c) * Bp[nu]
    pairs.append((Fraction(c + 1 - b * Bp[nu], top), Fraction(c, top)))
    cd2 = 2 * (1 + c) ** d * big_D(spec, a, b)
    den = 2 * Bp[nu + 1] * B
    pairs.append((Fraction(cd2 - Bp[nu + 1], den), Fraction(cd2 + Bp[nu + 1], den)))
    return IntervalSystem(tuple(pairs))


def interval_denominators(spec: ReductionSpec, a: int, b: int, c: int) -> list[int]:
    """Positive multipliers that clear each interval pair into a ``Q`` factor pair."""
    B = big_B(spec, a, b)
    nj, nu = spec.nj, spec.nu
    dens = [B] + [B ** nj[i] for i in range(1, nu + 1)]
    dens.append((b * b + c * c) * B ** nj[nu])
    dens.append(2 * B ** (nj[nu + 1] + 1))
    return dens


def W_shift(spec: ReductionSpec, a: int, c: int) -> int:
    return 2 + (1 + c) ** spec.delta * math.factorial(spec.delta) * spec.L_value(a)


def q_factors(spec: ReductionSpec, a: int, b: int, c: int, t: int) -> list[int]:
    """The ``2 (nu + 3)`` linear factors of ``Q(a, b, c, t)``."""
    B = big_B(spec, a, b)
    nj, nu, d = spec.nj, spec.nu, spec.delta
    W = W_shift(spec, a, c)
    out = [B * t - c, B * (t + 1) - c]
    for i in range(1, nu + 1):
        Bi = B ** nj[i]
        out.append(Bi * (t - i * W) - c - 1 + b * B ** nj[i - 1])
        out.append(Bi * (t + 1 - i * W) - c)
    Bn = B ** nj[nu]
    s = (b * b + c * c) * Bn
    out.append(s * (t - (nu + 1) * W) - c - 1 + b * Bn)
    out.append(s * (t + 1 - (nu + 1) * W) - c)
    top = B ** nj[nu + 1]
    lead = 2 * top * B
    cd2 = 2 * (1 + c) ** d * big_D(spec, a, b)
    out.append(lead * (t - (nu + 2) * W) - cd2 + top)
    out.append(lead * (t + 1 - (nu + 2) * W) - cd2 - top)
    return out


def q_value(spec: ReductionSpec, a: int, b: int, c: int, t: int) -> int:
    return math.prod(q_factors(spec, a, b, c, t))


def m_value(spec: ReductionSpec, a: int, b: int, c: int, t: int) -> int:
    gate = b * b - b
    if gate == 0:
        return -1
    return gate * (q_value(spec, a, b, c, t) + 1) - 1


def r_bound(spec: ReductionSpec, a: int, c: int) -> int:
    d = spec.delta
    return (spec.nu + 3) * (1 + c) ** d * math.factorial(d) * spec.L_value(a) + 2 * spec.nu + 4


def r_poly(spec: ReductionSpec, a: str = "a", c: str = "c") -> Poly:
    """``R(a, c) = k0 (1 + c)^(2 k1) L(a) + k2`` as a polynomial."""
    L = spec.L.rename({"a": a}) if "a" in spec.L.variables else spec.L
    return spec.k0 * (1 + Poly.var(c)) ** (2 * spec.k1) * L + spec.k2


def m_bound(spec: ReductionSpec, a: int, b: int, c: int, T: int) -> int:
    """An upper bound on ``|M(a, b, c, t)|`` valid for all ``|t| <= T``.

    Each factor of ``Q`` is linear in ``t``, so its size is at most
    ``|slope| T + |value at t = 0|``."""
    T = abs(T)
    at0 = q_factors(spec, a, b, c, 0)
    at1 = q_factors(spec, a, b, c, 1)
    qb = math.prod(abs(v1 - v0) * T + abs(v0) for v0, v1 in zip(at0, at1))
    return abs(b * b - b) * (qb + 1) + 1


# -- deciding and certifying --------------------------------------------------------


def holds_for_all_t(spec: ReductionSpec, a: int, b: int, c: int) -> bool:
    """``Q(a, b, c, t) >= 0`` for every integer ``t``, decided without enumerating t."""
    return contains_integer(interval_system(spec, a, b, c))


@dataclass(frozen=True)
class Certificate:
    a: int
    b: int
    c: int
    digits: tuple

    def to_text(self) -> str:
        return (
            f"a {self.a}\nb {self.b}\nc {self.c}\n"
            f"digits {' '.join(str(z) for z in self.digits)}\n"
        )

    @classmethod
    def from_text(cls, text: str) -> "Certificate":
        rec = {}
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            key, _, rest = line.partition(" ")
            rec[key] = rest.split()
        try:
            return cls(
                int(rec["a"][0]),
                int(rec["b"][0]),
                int(rec["c"][0]),
                tuple(int(z) for z in rec["digits"]),
            )
        except (KeyError, IndexError, ValueError) as exc:
            raise ValueError(f"malformed certificate: {exc}") from None

    def problems(self, spec: ReductionSpec) -> list[str]:
        """Violated invariants; an empty list means the certificate is accepted."""
        out = []
        if len(self.digits) != spec.nu + 1:
            out.append("wrong number of digits")
            return out
        if not spec.family.contains(self.b):
            out.append("b is not in the family")
        if self.b < 2:
            out.append("b < 2")
            return out
        if self.digits[0] != 1:
            out.append("z0 != 1")
        if any(not 0 <= z < self.b for z in self.digits):
            out.append("digit outside [0, b)")
        B = big_B(spec, self.a, self.b)
        if self.c != sum(z * B ** e for z, e in zip(self.digits, spec.nj)):
            out.append("c does not encode the digits")
        if self.c % self.b:
            out.append("b does not divide c")
        if not 0 < self.c < self.b ** spec.n:
            out.append("c outside (0, b^n)")
        if not holds_for_all_t(spec, self.a, self.b, self.c):
            out.append("some interval contains no integer")
        return out


def forward_certificate(spec: ReductionSpec, a: int, z: Sequence[int], minB: int = 0) -> Certificate:
    """Certificate for ``a`` from a nonnegative solution ``z1..z_nu`` of ``P0``."""
    z = tuple(int(v) for v in z)
    if len(z) != spec.nu:
        raise ValueError(f"need {spec.nu} witness values")
    if any(v < 0 for v in z):
        raise ValueError("witness values must be nonnegative")
    if spec.P0_value(a, z) != 0:
        raise ValueError("witness does not solve P0 = 0")
    need = max(minB, b_floor(spec, a), max(z, default=0) + 1, 2)
    b = spec.family.least_at_least(need)
    digits = (1, *z)
    B = big_B(spec, a, b)
    c = sum(d * B ** e for d, e in zip(digits, spec.nj))
    return Certificate(a, b, c, digits)


def decode_witness(spec: ReductionSpec, a: int, b: int, c: int) -> list[int] | None:
    """Digits ``z0..z_nu`` of ``c`` (with ``z0 = 1``) when the interval test passes."""
    if not holds_for_all_t(spec, a, b, c):
        return None
    digits = digit_decode(c, DigitSpec(b, big_B(spec, a, b), spec.nj[: spec.nu + 1]))
    if digits is None or digits[0] != 1:
        return None
    return digits


def window_samples(spec: ReductionSpec, a: int, c: int, samples: int) -> list[int]:
    """``t`` values just outside ``[-c^2, R(a, c)]`` at exponential distances."""
    lo, hi = -c * c, r_bound(spec, a, c)
    below = (samples + 1) // 2
    out = []
    for j in range(below):
        out.append(lo - 1 - ((1 << j) - 1))
    for j in range(samples - below):
        out.append(hi + 1 + ((1 << j) - 1))
    return out


def outside_window_check(spec: ReductionSpec, a: int, b: int, c: int, samples: int = 100) -> bool:
    return all(m_value(spec, a, b, c, t) >= 0 for t in window_samples(spec, a, c, samples))


def negative_scan(spec: ReductionSpec, a: int, c_max: int, b: int | None = None) -> list[int]:
    """The ``c`` in ``[0, c_max]`` accepted at ``b`` (default: least admissible)."""
    if b is None:
        b = spec.family.least_at_least(max(b_floor(spec, a), 2))
    return [c for c in range(c_max + 1) if holds_for_all_t(spec, a, b, c)]


# -- symbolic expansion -------------------------------------------------------------


def _guarded_mul(x: Poly, y: Poly, guard: int) -> Poly:
    if len(x) * len(y) > guard:
        raise ExpansionGuardError(f"product of {len(x)} x {len(y)} terms exceeds the guard {guard}")
    out = x * y
    if len(out) > guard:
        raise ExpansionGuardError(f"{len(out)} terms exceed the guard {guard}")
    return out


def _guarded_pow(x: Poly, e: int, guard: int) -> Poly:
    out = Poly.const(1)
    for _ in range(e):
        out = _guarded_mul(out, x, guard)
    return out


def q_factor_polys(spec: ReductionSpec, guard: int = DEFAULT_TERM_GUARD) -> list[Poly]:
    """The ``2(nu + 2)`` linear-in-``t`` factors of ``Q`` as polynomials in ``a, b, c, t``."""
    a, b, c, t = (Poly.var(v) for v in "abct")
    d, nj, nu = spec.delta, spec.nj, spec.nu
    Bpoly = 2 * (nu + 1) ** d * math.factorial(d) * _guarded_mul(b ** d, spec.L, guard)
    powers = {}

    def Bpow(e):
        if e not in powers:
            powers[e] = _guarded_pow(Bpoly, e, guard)
        return powers[e]

    W = 2 + math.factorial(d) * _guarded_mul((1 + c) ** d, spec.L, guard)
    D = Poly()
    for idx, p in spec.coeffs:
        e = nj[-1] - sum(i * n for i, n in zip(idx, nj))
        D = D + _weight(idx, d) * _guarded_mul(p, Bpow(e), guard)
    factors = [Bpoly * t - c, Bpoly * (t + 1) - c]
    for i in range(1, nu + 1):
        Bi = Bpow(nj[i])
        factors.append(_guarded_mul(Bi, t - i * W, guard) - c - 1 + b * Bpow(nj[i - 1]))
        factors.append(_guarded_mul(Bi, t + 1 - i * W, guard) - c)
    s = _guarded_mul(b * b + c * c, Bpow(nj[nu]), guard)
    factors.append(_guarded_mul(s, t - (nu + 1) * W, guard) - c - 1 + b * Bpow(nj[nu]))
    factors.append(_guarded_mul(s, t + 1 - (nu + 1) * W, guard) - c)
    top = Bpow(nj[nu + 1])
    lead = 2 * _guarded_mul(top, Bpoly, guard)
    cd2 = 2 * _guarded_mul(_guarded_pow(1 + c, d, guard), D, guard)
    factors.append(_guarded_mul(lead, t - (nu + 2) * W, guard) - cd2 + top)
    factors.append(_guarded_mul(lead, t + 1 - (nu + 2) * W, guard) - cd2 - top)
    return factors


def q_poly(spec: ReductionSpec, guard: int = DEFAULT_TERM_GUARD) -> Poly:
    """``Q`` expanded in ``a, b, c, t``; raises ExpansionGuardError when too large."""
    Q = Poly.const(1)
    for f in q_factor_polys(spec, guard):
        Q = _guarded_mul(Q, f, guard)
    return Q


def m_poly(spec: ReductionSpec, guard: int = DEFAULT_TERM_GUARD) -> Poly:
    b = Poly.var("b")
    return _guarded_mul(b * b - b, q_poly(spec, guard) + 1, guard) - 1
