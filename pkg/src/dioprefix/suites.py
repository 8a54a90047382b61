"""Seeded verification suites: each compares an implementation with a brute-force oracle.

Reports are deterministic for a given seed (no timings, no set ordering) and
end with one ``SUMMARY`` line.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable

from . import gadgets, intervals, oracles, radical
from .formulas import REPR_KINDS, build_repr, tag_prefix, th11_floor_sqrt_claim, th12_unique_sign, th13_pm
from .logic import prefix_tag
from .polyring import Poly, UniPoly, integer_roots, parse_poly


@dataclass
class Check:
    label: str
    total: int = 0
    agree: int = 0
    failures: list = field(default_factory=list)

    def record(self, ok: bool, detail=None):
        self.total += 1
        if ok:
            self.agree += 1
        elif len(self.failures) < 5:
            self.failures.append(detail)

    @property
    def ok(self) -> bool:
        return self.total > 0 and self.agree == self.total

    def line(self) -> str:
        pct = 100 * self.agree / self.total if self.total else 0.0
        pct_s = "100%" if self.agree == self.total and self.total else f"{pct:.2f}%"
        s = f"grid {self.label}: {self.agree}/{self.total} cases, {pct_s} agree"
        for f in self.failures:
            s += f"\n  mismatch: {f}"
        return s


@dataclass
class SuiteReport:
    name: str
    seed: int
    checks: list

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def text(self) -> str:
        lines = [f"suite {self.name} (seed {self.seed})"]
        lines += [c.line() for c in self.checks]
        total = sum(c.total for c in self.checks)
        agree = sum(c.agree for c in self.checks)
        status = "PASS" if self.ok else "FAIL"
        lines.append(f"SUMMARY suite={self.name} seed={self.seed} cases={total} agree={agree} status={status}")
        return "\n".join(lines)


# -- digit form -----------------------------------------------------------------------------


def suite_lemma21(rng: random.Random) -> list[Check]:
    equiv = Check("digit form, b in 1..3, B in b..5, nu <= 2, n within 1..4, c in [-5, b*B^n_nu + 5]")
    decode = Check("digit_decode round trip")
    for b in (1, 2, 3):
        for B in range(b, 6):
            for size in (1, 2, 3):
                for n in combinations(range(1, 5), size):
                    spec = intervals.DigitSpec(b, B, n)
                    top = b * B ** n[-1]
                    for c in range(-5, top + 6):
                        want = oracles.digit_form(c, b, B, n)
                        got = intervals.contains_integer(intervals.digit_intervals(c, spec))
                        equiv.record(got == want, (b, B, n, c, got))
                        z = intervals.digit_decode(c, spec)
                        ok = (z is not None) == want and (z is None or intervals.digit_encode(z, spec) == c)
                        decode.record(ok, (b, B, n, c, z))
    return [equiv, decode]


# -- product inequality ------------------------------------------------------------------------------


def random_unit_system(rng: random.Random, max_den: int = 20, k_max: int = 4):
    pairs = []
    for _ in range(rng.randint(1, k_max + 1)):
        d1, d2 = rng.randint(1, max_den), rng.randint(1, max_den)
        s = Fraction(rng.randint(-8 * d1, 8 * d1), d1)
        lo, hi = math.ceil(s * d2), math.floor((s + 1) * d2)
        pairs.append((s, Fraction(rng.randint(lo, hi), d2)))
    return intervals.IntervalSystem(tuple(pairs))


def suite_lemma22(rng: random.Random, count: int = 1000) -> list[Check]:
    minw = Check("least admissible W")
    boundary = Check("product nonnegative below tau_0 - 1 and above tau_k + kW")
    equiv = Check(f"{count} random systems, all-t condition vs t-scan and integer walk")
    for _ in range(count):
        sys = random_unit_system(rng)
        W0 = intervals.lemma22_min_W(sys)
        taus = sys.taus
        gap = max((x - y for x, y in zip(taus, taus[1:])), default=None)
        ok = W0 >= 1 and (gap is None or (W0 >= 1 + gap and (W0 == 1 or W0 - 1 < 1 + gap)))
        minw.record(ok, (str(sys), W0))
        W = W0 + rng.randint(0, 3)
        k = len(sys) - 1
        low = math.floor(taus[0] - 1)
        high = math.ceil(taus[-1] + k * W)
        ts = list(range(low - 6, low + 1)) + list(range(high, high + 7))
        boundary.record(oracles.product_scan(sys.pairs, W, ts), (str(sys), W))
        window = intervals.lemma22_scan_window(sys, W)
        scan = oracles.product_scan(sys.pairs, W, window)
        got = intervals.lemma22_holds_all_t(sys, W)
        equiv.record(got == scan == oracles.interval_integers(sys.pairs), (str(sys), W, got, scan))
    return [minw, boundary, equiv]


# -- coefficient extraction ------------------------------------------------------------------------------


def random_lemma23(rng: random.Random, force_zero: bool = False):
    nu = rng.randint(0, 2)
    delta = rng.randint(1, 3)
    z = tuple(rng.randint(0, 3) for _ in range(nu + 1))
    idxs = list(intervals.all_exponent_tuples(nu, delta))
    coeffs = {}
    for idx in rng.sample(idxs, rng.randint(1, len(idxs))):
        coeffs[idx] = rng.randint(-3, 3)
    zero = (0,) * (nu + 1)
    if force_zero:
        rest = sum(a * math.prod(x ** i for x, i in zip(z, idx)) for idx, a in coeffs.items() if idx != zero)
        coeffs[zero] = -rest
    L = max([1, *(abs(a) for a in coeffs.values())])
    return intervals.Lemma23Instance(coeffs, delta, nu, L, z)


def suite_lemma23(rng: random.Random, n_symbolic: int = 200, n_numeric: int = 500) -> list[Check]:
    sym = Check(f"{n_symbolic} symbolic coefficient identities")
    num = Check(f"{n_numeric} numeric equivalences at B = threshold + 1")
    for _ in range(n_symbolic):
        inst = random_lemma23(rng)
        P = intervals.lemma23_poly(inst)
        lhs = intervals.lemma23_symbolic_coefficient(inst)
        sym.record(lhs == math.factorial(inst.delta) * P, (inst.items(), inst.delta))
    for _ in range(n_numeric):
        inst = random_lemma23(rng, force_zero=rng.random() < 0.5)
        _, _, thr = intervals.lemma23_build(inst)
        got = intervals.lemma23_zero_iff(inst, thr + 1)
        want = inst.P_value() == 0
        num.record(got == want, (inst.items(), inst.z, got))
    return [sym, num]


# -- J_k --------------------------------------------------------------------------------------------------


def _jk2_reference() -> Poly:
    x1, x2, x = Poly.var("x1"), Poly.var("x2"), Poly.var("x")
    X = 1 + x1 * x1 + x2 * x2
    return (x * x - x1 - x2 * X * X) ** 2 - 4 * x1 * x2 * X * X


def suite_jk(rng: random.Random, k_max: int = 3, samples: int = 1000) -> list[Check]:
    sym = Check(f"jk symbolic cancellation, monic of degree 2^k, k <= {k_max}")
    for k in range(1, k_max + 1):
        elem = radical.jk_radical_product(k)
        only_rational = all(key == frozenset() or p.is_zero() for key, p in elem.components.items())
        J = radical.jk_symbolic(k)
        lead = J.leading_coefficient_in("x")
        sym.record(only_rational and J.degree_in("x") == 2 ** k and lead == 1, k)
    sym.record(radical.jk_symbolic(1) == Poly.var("x") ** 2 - Poly.var("x1"), "k=1 form")
    sym.record(radical.jk_symbolic(2) == _jk2_reference(), "k=2 form")

    exh = Check("jk decide_squares exhaustive k <= 2, A in [-5, 50]")
    rng_vals = range(-5, 51)
    for a in rng_vals:
        exh.record(radical.decide_squares((a,)) == oracles.square(a), (a,))
    for a in rng_vals:
        for b in rng_vals:
            exh.record(radical.decide_squares((a, b)) == (oracles.square(a) and oracles.square(b)), (a, b))
    rnd = Check(f"jk decide_squares {samples} random k = 3, A in [-2, 30]")
    squares = [i * i for i in range(6)]
    for _ in range(samples):
        A = tuple(rng.choice(squares) if rng.random() < 0.6 else rng.randint(-2, 30) for _ in range(3))
        rnd.record(radical.decide_squares(A) == all(map(oracles.square, A)), A)

    sh = Check(f"jk shifted {samples} random (A, S, T), |values| <= 30")
    for _ in range(samples):
        k = rng.randint(1, 2)
        A = tuple(rng.choice(squares) if rng.random() < 0.5 else rng.randint(-30, 30) for _ in range(k))
        S = rng.choice([v for v in range(-30, 31) if v])
        T = S * rng.randint(-3, 3) if rng.random() < 0.5 else rng.randint(-30, 30)
        got = bool(integer_roots(radical.jk_shifted(A, S, T)))
        sh.record(got == (all(map(oracles.square, A)) and T % S == 0), (A, S, T))

    cb = Check(f"jk combine_decide {samples} random inputs, |values| <= 20")
    for _ in range(samples):
        k = rng.randint(1, 2)
        A = tuple(rng.choice(squares[:5]) if rng.random() < 0.5 else rng.randint(-20, 20) for _ in range(k))
        S = rng.choice([v for v in range(-20, 21) if v])
        T = S * rng.randint(-1, 1) if rng.random() < 0.5 else rng.randint(-20, 20)
        R = rng.randint(-20, 20)
        inp = radical.CombineInput(A, R, S, T)
        cb.record(radical.combine_decide(inp) == oracles.combine_condition(A, R, S, T), (A, R, S, T))
    return [sym, exh, rnd, sh, cb]


# -- gadgets ------------------------------------------------------------------------------------------


def suite_pell(rng: random.Random) -> list[Check]:
    minimal = Check("pell fundamental minimal vs brute force, nonsquare D <= 30")
    exact = Check("pell equation exact, nonsquare D <= 200")
    for D in range(2, 201):
        if oracles.square(D):
            continue
        x, y = gadgets.pell_fundamental(D)
        exact.record(x * x - D * y * y == 1 and y >= 1, D)
        if D <= 30:
            minimal.record((x, y) == oracles.pell_minimal(D), D)
    three = Check("three-squares witness exists iff C >= 0, C in [-50, 200]")
    for C in range(-50, 201):
        w = gadgets.three_squares_witness(C)
        ok = (w is not None) == oracles.three_squares(C) and (
            w is None or gadgets.GadgetWitness("three_squares", w).check(C)
        )
        three.record(ok, C)
    nonneg = Check("pell nonnegativity witness, C in [-20, 40]")
    for C in range(-20, 41):
        x = gadgets.pell_nonneg_witness(C)
        if C >= 0:
            nonneg.record(x is not None and gadgets.GadgetWitness("pell", (x,)).check(C), C)
        else:
            nonneg.record(x is None and gadgets.pell_negative_scan(C, 2000), C)
    tung = Check("(2u+1)(3v+1) witnesses, C in [-10^4, 10^4] minus 0")
    for C in range(-10 ** 4, 10 ** 4 + 1):
        if C:
            u, v = gadgets.tung_nonzero_witness(C)
            tung.record((2 * u + 1) * (3 * v + 1) == C, C)
    return [minimal, exact, three, nonneg, tung]


def suite_lemma52(rng: random.Random) -> list[Check]:
    uniq = Check("unique nonnegative minimiser, k in {2, 4}, m = 3 mod 4, |m| <= 500")
    local = Check("local criterion iff global minimum, b in [-30, 30]")
    pm = Check("P+ > 0 and P- > 0 iff nearest power, k in {2, 4}, |q| <= 125, |b| <= 30")
    for k in (2, 4):
        for m in range(-500, 501):
            if m % 4 != 3:
                continue
            best = oracles.nearest_scan(m, k)
            nonneg = [b for b in best if b >= 0]
            uniq.record(nonneg == [gadgets.nearest_power(m, k)], (m, k, best))
            for b in range(-30, 31):
                local.record(gadgets.local_min_criterion(b, m, k) == (b in best), (b, m, k))
        for q in range(-125, 126):
            best = oracles.nearest_scan(4 * q - 1, k)
            for b in range(-30, 31):
                Pp, Pm = th13_pm(b, q, k)
                pm.record((Pp > 0 and Pm > 0) == (b in best), (b, q, k))
    return [uniq, local, pm]


def suite_th_claims(rng: random.Random, s_max: int = 10 ** 4) -> list[Check]:
    floor = Check(f"D(c, s) <= 0 pins c = isqrt(s), s in [0, {s_max}]")
    sign = Check(f"at most one sign c = +-isqrt(s) with 4(s - c^2) + 3 | c + 1, s in [0, {s_max}]")
    for s in range(s_max + 1):
        cs = []
        c = 0
        while c * c <= s:
            if (s - c * c) * (s - c * c - c) <= 0:
                cs.append(c)
            c += 1
        r = c - 1  # largest c with c^2 <= s
        got = th11_floor_sqrt_claim(s)
        floor.record(len(cs) <= 1 and got == (cs[0] if cs else None) and got in (None, r), s)
        hits = [c for c in {r, -r} if (c + 1) % (4 * (s - r * r) + 3) == 0]
        sign.record(len(hits) <= 1 and th12_unique_sign(s) == (hits[0] if hits else None), s)
    forward = Check("s = b + c^2 with 0 <= b <= b^2 <= c pins c")
    for c in range(0, 200):
        b = 0
        while b * b <= c:
            forward.record(th11_floor_sqrt_claim(b + c * c) == c, (b, c))
            b += 1
    shapes = Check("representation prefixes match their tags")
    specs = {}
    from .reduction import spec_build

    P0 = parse_poly("(- a (^ z1 2))")
    for kind in REPR_KINDS:
        fam = "sq2" if kind in REPR_KINDS[:6] else ("4sq3" if kind in REPR_KINDS[6:9] else "evensq4")
        if fam not in specs:
            specs[fam] = spec_build(P0, fam)
        f = build_repr(kind, specs[fam])
        shapes.record(prefix_tag(f) == tag_prefix(kind), kind)
    return [floor, sign, forward, shapes]


def suite_odd_squares(rng: random.Random) -> list[Check]:
    c = Check("three odd squares search vs set definition, odd a in [1, 999]")
    for a in range(1, 1000, 2):
        got = gadgets.oh_sun_member(a)
        w = gadgets.oh_sun_witness(a)
        ok = got == oracles.odd_non_3mod4_prime(a) == gadgets.in_oh_sun_set(a)
        if w is not None:
            x, y, z = w
            ok = ok and a * a == (2 * x + 1) ** 2 + 8 * (2 * y + 1) ** 2 + 8 * (2 * z + 1) ** 2
        c.record(ok, a)
    return [c]


SUITES: dict[str, Callable[[random.Random], list[Check]]] = {
    "lemma21": suite_lemma21,
    "lemma22": suite_lemma22,
    "lemma23": suite_lemma23,
    "jk": suite_jk,
    "pell": suite_pell,
    "lemma52": suite_lemma52,
    "th-claims": suite_th_claims,
    "odd-squares": suite_odd_squares,
}


def run_suite(name: str, seed: int = 0) -> SuiteReport:
    if name == "all":
        checks = []
        for n in SUITES:
            checks += SUITES[n](random.Random(seed))
        return SuiteReport("all", seed, checks)
    if name not in SUITES:
        raise KeyError(name)
    return SuiteReport(name, seed, SUITES[name](random.Random(seed)))
