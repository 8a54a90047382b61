"""Command-line front end.

Exit codes: 0 when the answer is true or verified, 1 when it is false or
refuted, 2 for usage and internal errors (message on stderr).
"""

from __future__ import annotations

import argparse
import re
import sys
from fractions import Fraction
from pathlib import Path

from . import gadgets, intervals, radical, reduction
from .formulas import ALL_KINDS, build_repr, default_funcs
from .logic import BoxError, UnboundVariableError, eval_bounded, parse_formula, print_formula
from .polyring import MissingVariableError, integer_roots, parse_poly, print_poly, rat_str
from .sexpr import ParseError


class UsageError(Exception):
    pass


_DIGITS = re.compile(r"-?\d{2,}")


def elide(text: str, cap: int | None) -> str:
    """Shorten every digit run longer than ``cap`` to ``head(...N digits...)tail``."""
    if not cap:
        return text

    def repl(m):
        s = m.group(0)
        sign = "-" if s.startswith("-") else ""
        digits = s.lstrip("-")
        if len(digits) <= cap:
            return s
        keep = max(1, cap // 2)
        return f"{sign}{digits[:keep]}(...{len(digits)} digits...){digits[-keep:]}"

    return _DIGITS.sub(repl, text)


class Out:
    def __init__(self, cap: int | None):
        self.cap = cap

    def __call__(self, *parts):
        print(elide(" ".join(str(p) for p in parts), self.cap))


# -- flag parsing helpers -------------------------------------------------------------


def int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def rat_list(text: str) -> list[Fraction]:
    try:
        return [Fraction(x.strip()) for x in text.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected comma-separated rationals, got {text!r}") from None


def box_spec(text: str) -> dict[str, tuple[int, int]]:
    box = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        m = re.fullmatch(r"([A-Za-z][A-Za-z0-9_]*)=(-?\d+)\.\.(-?\d+)", item)
        if not m:
            raise argparse.ArgumentTypeError(f"bad box entry {item!r}; expected var=lo..hi")
        box[m.group(1)] = (int(m.group(2)), int(m.group(3)))
    return box


def assignments(text: str) -> dict[str, int]:
    env = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        m = re.fullmatch(r"([A-Za-z][A-Za-z0-9_]*)=(-?\d+)", item)
        if not m:
            raise argparse.ArgumentTypeError(f"bad assignment {item!r}; expected var=value")
        env[m.group(1)] = int(m.group(2))
    return env


def read_poly(path: str):
    try:
        return parse_poly(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def verdict(out: Out, ok: bool, label: str = "verdict") -> int:
    out(f"{label}: {'true' if ok else 'false'}")
    return 0 if ok else 1


# -- subcommands ------------------------------------------------------------------------------


def cmd_gadget(args, out: Out) -> int:
    if args.gadget == "pell":
        try:
            x, y = gadgets.pell_fundamental(args.D)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        out(x, y)
        return 0
    if args.gadget == "three-squares":
        w = gadgets.three_squares_witness(args.C)
        out("none" if w is None else " ".join(map(str, w)))
        return 0 if w is not None else 1
    if args.gadget == "tung":
        if args.C == 0:
            out("none")
            return 1
        out(*gadgets.tung_nonzero_witness(args.C))
        return 0
    if args.gadget == "oh-sun":
        if args.a < 0:
            raise UsageError("a must be nonnegative")
        w = gadgets.oh_sun_witness(args.a)
        out("none" if w is None else " ".join(map(str, w)))
        return 0 if w is not None else 1
    raise UsageError("unknown gadget")


def cmd_jk(args, out: Out) -> int:
    if args.k < 1:
        raise UsageError("k must be positive")
    if args.eval is None:
        if args.shift or args.combine:
            raise UsageError("--shift and --combine need --eval")
        try:
            out(print_poly(radical.jk_symbolic(args.k, cap=args.cap)))
        except radical.ArityCapError as exc:
            raise UsageError(str(exc)) from None
        return 0
    A = args.eval
    if len(A) != args.k:
        raise UsageError(f"--eval has {len(A)} values but k = {args.k}")
    if args.shift and args.combine:
        raise UsageError("use at most one of --shift and --combine")
    if args.shift:
        if len(args.shift) != 2 or args.shift[0] == 0:
            raise UsageError("--shift needs S,T with S != 0")
        S, T = args.shift
        p = radical.jk_shifted(A, S, T)
        roots = sorted(integer_roots(p))
        out("poly:", p)
        out("integer roots:", " ".join(map(str, roots)) or "none")
        return verdict(out, bool(roots))
    if args.combine:
        if len(args.combine) != 3 or args.combine[1] == 0:
            raise UsageError("--combine needs R,S,T with S != 0")
        R, S, T = args.combine
        inp = radical.CombineInput(A, R, S, T)
        out("poly:", radical.relation_combine(inp))
        return verdict(out, radical.combine_decide(inp))
    p = radical.jk_eval(A)
    roots = sorted(integer_roots(p))
    out("poly:", p)
    out("integer roots:", " ".join(map(str, roots)) or "none")
    return verdict(out, bool(roots))


def cmd_lemma21(args, out: Out) -> int:
    try:
        spec = intervals.DigitSpec(args.b, args.B, tuple(args.n))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    sys_ = intervals.digit_intervals(args.c, spec)
    for i, (s, t) in enumerate(sys_):
        out(f"interval {i}: [{rat_str(s)}, {rat_str(t)}]")
    z = intervals.digit_decode(args.c, spec)
    out("decode:", "none" if z is None else " ".join(map(str, z)))
    return verdict(out, intervals.contains_integer(sys_))


def cmd_lemma22(args, out: Out) -> int:
    if len(args.sigmas) != len(args.taus) or not args.sigmas:
        raise UsageError("--sigmas and --taus need the same positive length")
    sys_ = intervals.IntervalSystem(tuple(zip(args.sigmas, args.taus)))
    if not sys_.unit_width():
        raise UsageError("each interval needs 0 <= tau - sigma <= 1")
    W = intervals.lemma22_min_W(sys_) if args.W is None else args.W
    if not intervals.lemma22_W_ok(sys_, W):
        raise UsageError(f"W = {W} is below 1 + max(tau_i - tau_(i+1))")
    out("system:", sys_)
    out("W:", W)
    return verdict(out, intervals.lemma22_holds_all_t(sys_, W))


def cmd_lemma23(args, out: Out) -> int:
    P = read_poly(args.poly)
    names = [f"z{i}" for i in range(len(args.z))]
    try:
        inst = intervals.Lemma23Instance.from_poly(P, names, args.z)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _, _, thr = intervals.lemma23_build(inst)
    B = thr + 1 if args.B is None else args.B
    if B <= thr:
        raise UsageError(f"B must exceed {thr}")
    lo, hi = intervals.lemma23_interval(inst, B)
    out("threshold:", thr)
    out("B:", B)
    out(f"interval: [{rat_str(lo)}, {rat_str(hi)}]")
    w = intervals.lemma23_z_witness(inst, B)
    out("integer:", "none" if w is None else w)
    return verdict(out, intervals.lemma23_zero_iff(inst, B), "P(z) = 0")


def _spec(args):
    try:
        return reduction.spec_build(read_poly(args.p0), args.family)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_reduce(args, out: Out) -> int:
    spec = _spec(args)
    if args.action == "build":
        out("P:", print_poly(spec.P))
        out("delta:", spec.delta)
        out("nu:", spec.nu)
        out("n_j:", " ".join(map(str, spec.nj)))
        out("L:", print_poly(spec.L))
        out("k0:", spec.k0)
        out("k1:", spec.k1)
        out("k2:", spec.k2)
        out("n:", spec.n)
        out("family:", spec.family.kind)
        return 0
    if args.action == "certify":
        try:
            cert = reduction.forward_certificate(spec, args.a, args.z, args.min_b)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        for line in cert.to_text().splitlines():
            out(line)
        problems = cert.problems(spec)
        for p in problems:
            out("problem:", p)
        return verdict(out, not problems, "certificate accepted")
    if args.action == "scan":
        if args.c_max < 0:
            raise UsageError("--c-max must be nonnegative")
        b = spec.family.least_at_least(max(reduction.b_floor(spec, args.a), 2))
        hits = reduction.negative_scan(spec, args.a, args.c_max, b)
        out("b:", b)
        out(f"accepted c in [0, {args.c_max}]:", " ".join(map(str, hits)) or "none")
        # The negative claim is "no c is accepted"; 0 means it held on the whole range.
        return verdict(out, not hits, "all rejected")
    raise UsageError("unknown reduce action")


def cmd_repr(args, out: Out) -> int:
    spec = _spec(args)
    f = build_repr(args.kind, spec, embed=args.embed)
    text = print_formula(f) + "\n"
    if args.output:
        Path(args.output).write_text(text)
        out(f"wrote {args.output} ({len(text)} bytes)")
    else:
        sys.stdout.write(elide(text, out.cap))
    return 0


def cmd_eval(args, out: Out) -> int:
    try:
        text = Path(args.formula).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {args.formula}: {exc.strerror}") from None
    free = args.free or {}
    f = parse_formula(text, free=tuple(free))
    spec = _spec(args) if args.p0 else None
    try:
        ok = eval_bounded(f, free, args.box or {}, default_funcs(spec))
    except BoxError as exc:
        raise UsageError(str(exc)) from None
    except MissingVariableError as exc:
        raise UsageError(f"no value for {exc.args[0]!r}; pass it with --free") from None
    except KeyError as exc:
        raise UsageError(f"{exc.args[0]}; pass --p0 to supply M") from None
    return verdict(out, ok)


def cmd_verify(args, out: Out) -> int:
    from .suites import run_suite

    report = run_suite(args.name, args.seed)
    out(report.text())
    return 0 if report.ok else 1


# -- parser ----------------------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dioprefix", description="Polynomial encodings for mixed quantifier prefixes.")
    p.add_argument("--digits-cap", type=int, default=None, metavar="N",
                   help="elide the middle of integers longer than N digits (off by default)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gadget", help="sign, nonzero and Pell witnesses")
    gs = g.add_subparsers(dest="gadget", required=True, parser_class=_Parser)
    gs.add_parser("pell").add_argument("--D", type=int, required=True)
    gs.add_parser("three-squares").add_argument("--C", type=int, required=True)
    gs.add_parser("tung").add_argument("--C", type=int, required=True)
    gs.add_parser("oh-sun").add_argument("--a", type=int, required=True)

    j = sub.add_parser("jk", help="the square-detecting polynomial J_k")
    j.add_argument("--k", type=int, required=True)
    j.add_argument("--eval", type=int_list)
    j.add_argument("--shift", type=int_list, metavar="S,T")
    j.add_argument("--combine", type=int_list, metavar="R,S,T")
    j.add_argument("--cap", type=int, default=radical.DEFAULT_ARITY_CAP)

    l1 = sub.add_parser("lemma21", help="digit form as interval containment")
    l1.add_argument("--b", type=int, required=True)
    l1.add_argument("--B", type=int, required=True)
    l1.add_argument("--n", type=int_list, required=True)
    l1.add_argument("--c", type=int, required=True)

    l2 = sub.add_parser("lemma22", help="interval containment as a for-all-t inequality")
    l2.add_argument("--sigmas", type=rat_list, required=True)
    l2.add_argument("--taus", type=rat_list, required=True)
    l2.add_argument("--W", type=int)

    l3 = sub.add_parser("lemma23", help="zero test by coefficient extraction")
    l3.add_argument("--poly", required=True)
    l3.add_argument("--z", type=int_list, required=True)
    l3.add_argument("--B", type=int)

    r = sub.add_parser("reduce", help="the master-polynomial pipeline")
    ra = r.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name in ("build", "certify", "scan"):
        q = ra.add_parser(name)
        q.add_argument("--p0", required=True)
        q.add_argument("--family", choices=sorted(reduction.FAMILIES), default="sq2")
        if name in ("certify", "scan"):
            q.add_argument("--a", type=int, required=True)
        if name == "certify":
            q.add_argument("--z", type=int_list, default=[])
            q.add_argument("--min-b", type=int, default=0)
        if name == "scan":
            q.add_argument("--c-max", type=int, required=True)

    rp = sub.add_parser("repr", help="representation formulas")
    rpa = rp.add_subparsers(dest="action", required=True, parser_class=_Parser)
    rb = rpa.add_parser("build")
    rb.add_argument("--kind", choices=ALL_KINDS, required=True)
    rb.add_argument("--p0", required=True)
    rb.add_argument("--family", choices=sorted(reduction.FAMILIES), default=None,
                    help="defaults to the family the kind's construction uses")
    rb.add_argument("--embed", choices=("call", "symbolic"), default="call")
    rb.add_argument("-o", "--output")

    e = sub.add_parser("eval", help="bounded evaluation of a formula file")
    e.add_argument("--formula", required=True)
    e.add_argument("--box", type=box_spec)
    e.add_argument("--free", type=assignments, help="values of free parameters, e.g. a=4")
    e.add_argument("--p0", help="reduction input supplying the M atoms")
    e.add_argument("--family", choices=sorted(reduction.FAMILIES), default="sq2")

    v = sub.add_parser("verify", help="seeded oracle suites")
    va = v.add_subparsers(dest="action", required=True, parser_class=_Parser)
    vs = va.add_parser("suite")
    vs.add_argument("--name", required=True,
                    choices=["lemma21", "lemma22", "lemma23", "jk", "pell", "lemma52", "th-claims", "odd-squares", "all"])
    vs.add_argument("--seed", type=int, default=0)
    return p


def kind_family(kind: str) -> str:
    if kind.startswith(("E1A1E4", "A1E1A3E2")):
        return "4sq3"
    if kind.startswith(("E1A2E3", "E1A6E2", "E1A5E2", "A1E2A2E2", "A1E7")):
        return "evensq4"
    return "sq2"


COMMANDS = {
    "gadget": cmd_gadget,
    "jk": cmd_jk,
    "lemma21": cmd_lemma21,
    "lemma22": cmd_lemma22,
    "lemma23": cmd_lemma23,
    "reduce": cmd_reduce,
    "repr": cmd_repr,
    "eval": cmd_eval,
    "verify": cmd_verify,
}


def _hoist_global_flags(argv: list[str]) -> list[str]:
    """Allow ``--digits-cap`` anywhere on the command line."""
    front, rest = [], []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a == "--digits-cap" and i + 1 < len(argv):
            front += argv[i : i + 2]
            i += 2
            continue
        if a.startswith("--digits-cap="):
            front.append(a)
        else:
            rest.append(a)
        i += 1
    return front + rest


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_hoist_global_flags(argv))
        if args.digits_cap is not None and args.digits_cap < 1:
            raise UsageError("--digits-cap must be positive")
        if args.command == "repr" and args.family is None:
            args.family = kind_family(args.kind)
        return COMMANDS[args.command](args, Out(args.digits_cap))
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ParseError, UnboundVariableError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return 0 if exc.code in (0, None) else 2
    except Exception as exc:  # noqa: BLE001 - reported as an internal error
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
