"""Acceptance criteria, each run at its stated scale and time limit.

Every test prints one ``criterion N: PASS|FAIL`` line to the terminal.
"""

import math
import random
import time

import pytest

from dioprefix import oracles
from dioprefix.formulas import ALL_KINDS, build_repr, tag_prefix, th13_forward
from dioprefix.gadgets import in_oh_sun_set, nearest_power, oh_sun_member, oh_sun_witness
from dioprefix.logic import parse_formula, prefix_tag, print_formula
from dioprefix.polyring import parse_poly, print_poly
from dioprefix.reduction import (
    b_floor,
    forward_certificate,
    holds_for_all_t,
    m_value,
    negative_scan,
    outside_window_check,
    spec_build,
    window_samples,
)
from dioprefix.suites import (
    suite_jk,
    suite_lemma21,
    suite_lemma22,
    suite_lemma23,
    suite_lemma52,
    suite_odd_squares,
    suite_pell,
    suite_th_claims,
)

from gen import random_formula, random_poly

SQUARES = parse_poly("(- a (^ z1 2))")


def report(capsys, number, title, limit, body):
    start = time.perf_counter()
    lines = body()
    elapsed = time.perf_counter() - start
    ok = all(lines.values()) and elapsed < limit
    with capsys.disabled():
        print(
            f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} {title} "
            f"({elapsed:.1f}s, limit {limit}s)"
        )
        for label, good in lines.items():
            if not good:
                print(f"  failed: {label}")
    assert all(lines.values()), [k for k, v in lines.items() if not v]
    assert elapsed < limit


def checks_of(*groups):
    return {c.line().splitlines()[0]: c.ok for g in groups for c in g}


def test_criterion_1_digit_form(capsys):
    report(capsys, 1, "digit form vs interval condition", 60,
           lambda: checks_of(suite_lemma21(random.Random(1))))


def test_criterion_2_product_inequality(capsys):
    report(capsys, 2, "product inequality vs t-scan", 30,
           lambda: checks_of(suite_lemma22(random.Random(2), count=1000)))


def test_criterion_3_coefficient_extraction(capsys):
    report(capsys, 3, "coefficient extraction identity and zero test", 60,
           lambda: checks_of(suite_lemma23(random.Random(3), 200, 500)))


def test_criterion_4_jk(capsys):
    report(capsys, 4, "J_k cancellation, square detection, shift and combine", 60,
           lambda: checks_of(suite_jk(random.Random(4), k_max=4, samples=1000)))


def _pipeline():
    spec = spec_build(SQUARES)
    out = {}
    widest = 0
    for a in (0, 1, 4, 9):
        cert = forward_certificate(spec, a, [math.isqrt(a)])
        out[f"certificate a={a} accepted"] = cert.problems(spec) == []
        out[f"exact interval check a={a}"] = holds_for_all_t(spec, a, cert.b, cert.c)
        out[f"outside window a={a}, 100 samples"] = outside_window_check(spec, a, cert.b, cert.c, 100)
        for t in window_samples(spec, a, cert.c, 100):
            widest = max(widest, abs(m_value(spec, a, cert.b, cert.c, t)).bit_length())
    out["intermediates exceed 1000 digits"] = widest * math.log10(2) > 1000
    for a in (2, 3, 5):
        b = spec.family.least_at_least(max(b_floor(spec, a), 2))
        out[f"negative scan a={a}, c in [0, 10^4]"] = negative_scan(spec, a, 10 ** 4, b) == []
    return out


def test_criterion_5_pipeline(capsys):
    report(capsys, 5, "master polynomial pipeline on the squares", 300, _pipeline)


def test_criterion_6_gadgets(capsys):
    report(capsys, 6, "Pell, three squares, nonzero witnesses", 60,
           lambda: checks_of(suite_pell(random.Random(6))))


def _nearest_power_claims():
    out = checks_of(suite_lemma52(random.Random(7)))
    spec = spec_build(SQUARES, "evensq4")
    cert = forward_certificate(spec, 4, [2])
    b0 = math.isqrt(cert.b - 4)
    fw = th13_forward(spec, b0, cert.c)
    out["forward chain: certificate accepted"] = cert.problems(spec) == []
    out["forward chain: q integral and c recovered"] = fw["c_back"] == cert.c
    out["forward chain: P+ > 0 and P- > 0"] = all(v > 0 for v in fw["P"])
    out["forward chain: b0 is the nearest power"] = nearest_power(fw["m"], fw["k"]) == b0
    out["forward chain: all-t condition"] = holds_for_all_t(spec, 4, b0 * b0 + 4, fw["c_back"])
    return out


def test_criterion_7_nearest_power(capsys):
    report(capsys, 7, "nearest even power and the q construction", 60, _nearest_power_claims)


def _claims():
    out = checks_of(suite_th_claims(random.Random(8)))
    spec = spec_build(SQUARES)
    for kind in ALL_KINDS:
        out[f"prefix {kind}"] = prefix_tag(build_repr(kind, spec)) == tag_prefix(kind)
    return out


def test_criterion_8_claims_and_prefixes(capsys):
    report(capsys, 8, "floor-sqrt pinning, unique sign, prefix shapes", 30, _claims)


def _oh_sun():
    out = checks_of(suite_odd_squares(random.Random(9)))
    agree = all(oh_sun_member(a) == oracles.oh_sun_scan(a) for a in range(1, 200, 2))
    out["signed scan agrees, odd a < 200"] = agree
    out["witness exists iff member"] = all(
        (oh_sun_witness(a) is not None) == in_oh_sun_set(a) for a in range(1, 1000, 2)
    )
    return out


def test_criterion_9_odd_squares(capsys):
    report(capsys, 9, "three-variable representation of odd non-(3 mod 4)-primes", 60, _oh_sun)


def _formats():
    rng = random.Random(10)
    polys_ok = True
    for _ in range(10 ** 4):
        text = print_poly(random_poly(rng))
        again = print_poly(parse_poly(text))
        polys_ok = polys_ok and again == text and print_poly(parse_poly(again)) == text
    forms_ok = True
    for _ in range(10 ** 4):
        f = random_formula(rng)
        text = print_formula(f)
        g = parse_formula(text, free=["a"])
        forms_ok = forms_ok and g == f and print_formula(g) == text
    return {"10^4 polynomial round trips": polys_ok, "10^4 formula round trips": forms_ok}


def test_criterion_10_formats(capsys):
    report(capsys, 10, "canonical printing round trips", 30, _formats)
