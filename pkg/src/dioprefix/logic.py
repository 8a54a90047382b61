"""Quantified formulas over integer variables.

Terms are polynomials that may also contain calls to named integer functions
(``(@ M a b c t)``).  Such calls let a representation mention a polynomial
that is far too large to expand, while still being evaluable.  Every maximal
call-free subterm is kept as a single expanded ``Lit``, so structural
equality of terms is well defined and printing is canonical.

Formula grammar (S-expressions)::

    formula := (= term 0) | (>= term 0) | (/= term 0)
             | (and formula*) | (or formula*) | (not formula)
             | (exists x formula) | (forall x formula)
             | (exists (x lo hi) formula) | (forall (x lo hi) formula)
             | (free (a ...) formula)
    term    := poly | (+ term+) | (* term+) | (- term term) | (^ term uint)
             | (@ name term*)
"""

from __future__ import annotations

import math

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .polyring import (
    INT_RE,
    VAR_RE,
    MissingVariableError,
    Poly,
    parse_exponent,
    print_poly,
)
from .sexpr import Atom, ParseError, SList, read


class UnboundVariableError(ValueError):
    pass


class BoxError(ValueError):
    """An unbounded quantifier has no search range."""


# -- terms ------------------------------------------------------------------


class Term:
    __slots__ = ()

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return mul(-1, self)

    def __sub__(self, other):
        return add(self, neg(other))

    def __rsub__(self, other):
        return add(other, neg(self))

    def __pow__(self, e: int):
        return power(self, e)


@dataclass(frozen=True, eq=True)
class Lit(Term):
    poly: Poly

    def free_vars(self) -> frozenset:
        return frozenset(self.poly.variables)


@dataclass(frozen=True, eq=True)
class Add(Term):
    items: tuple

    def free_vars(self) -> frozenset:
        return frozenset().union(*(t.free_vars() for t in self.items))


@dataclass(frozen=True, eq=True)
class Mul(Term):
    items: tuple

    def free_vars(self) -> frozenset:
        return frozenset().union(*(t.free_vars() for t in self.items))


@dataclass(frozen=True, eq=True)
class Pow(Term):
    base: Term
    exp: int

    def free_vars(self) -> frozenset:
        return self.base.free_vars()


@dataclass(frozen=True, eq=True)
class Call(Term):
    name: str
    args: tuple

    def free_vars(self) -> frozenset:
        return frozenset().union(*(t.free_vars() for t in self.args))


def term(value) -> Term:
    if isinstance(value, Term):
        return value
    if isinstance(value, (int, Poly)):
        return Lit(Poly.coerce(value))
    if isinstance(value, str):
        return Lit(Poly.var(value))
    raise TypeError(f"cannot make a term from {value!r}")


def add(*items) -> Term:
    flat: list[Term] = []
    lit = Poly()
    for t in map(term, items):
        for u in t.items if isinstance(t, Add) else (t,):
            if isinstance(u, Lit):
                lit = lit + u.poly
            else:
                flat.append(u)
    if not flat:
        return Lit(lit)
    if not lit.is_zero():
        flat.insert(0, Lit(lit))
    return flat[0] if len(flat) == 1 else Add(tuple(flat))


# Literal products and powers are expanded only while the number of
# coefficient multiplications stays below this; larger ones stay as factors.
LIT_MERGE_LIMIT = 20_000


def mul(*items) -> Term:
    lits: list[Poly] = []
    flat: list[Term] = []
    for t in map(term, items):
        for u in t.items if isinstance(t, Mul) else (t,):
            if isinstance(u, Lit):
                p = u.poly
                if p.is_zero():
                    return Lit(Poly())
                if lits and len(lits[-1]) * len(p) <= LIT_MERGE_LIMIT:
                    lits[-1] = lits[-1] * p
                else:
                    lits.append(p)
            else:
                flat.append(u)
    if lits and lits[0] == 1:
        lits.pop(0)
    out = [Lit(p) for p in lits] + flat
    if not out:
        return Lit(Poly.const(1))
    return out[0] if len(out) == 1 else Mul(tuple(out))


def neg(t) -> Term:
    return mul(-1, t)


def sub(a, b) -> Term:
    return add(a, neg(b))


def power(base, e: int) -> Term:
    base = term(base)
    if e < 0:
        raise ValueError("negative exponent")
    if isinstance(base, Lit) and (e <= 1 or _small_power(base.poly, e)):
        return Lit(base.poly ** e)
    if e == 0:
        return Lit(Poly.const(1))
    if e == 1:
        return base
    return Pow(base, e)


def _small_power(p: Poly, e: int) -> bool:
    if len(p) <= 1:
        return True
    size = len(p)
    for _ in range(e - 1):
        if size * len(p) > LIT_MERGE_LIMIT:
            return False
        size = min(size * len(p), math.comb(size + len(p), len(p)))
    return True


def call(name: str, *args) -> Term:
    if not VAR_RE.match(name):
        raise ValueError(f"bad function name {name!r}")
    return Call(name, tuple(term(a) for a in args))


def substitute_term(t: Term, mapping: Mapping[str, Term]) -> Term:
    """Replace free variables by terms."""
    if isinstance(t, Lit):
        relevant = {v: term(mapping[v]) for v in t.poly.variables if v in mapping}
        if not relevant:
            return t
        if all(isinstance(r, Lit) for r in relevant.values()):
            return Lit(t.poly.substitute_all({v: r.poly for v, r in relevant.items()}))
        # Expand term-valued substitutions monomial by monomial.
        vars_ = t.poly.variables
        total: Term = Lit(Poly())
        for exps, c in t.poly.term_items():
            factors = [c]
            for v, e in zip(vars_, exps):
                if e:
                    factors.append(power(relevant.get(v, term(v)), e))
            total = add(total, mul(*factors))
        return total
    if isinstance(t, Add):
        return add(*(substitute_term(u, mapping) for u in t.items))
    if isinstance(t, Mul):
        return mul(*(substitute_term(u, mapping) for u in t.items))
    if isinstance(t, Pow):
        return power(substitute_term(t.base, mapping), t.exp)
    return Call(t.name, tuple(substitute_term(u, mapping) for u in t.args))


def print_term(t: Term) -> str:
    if isinstance(t, Lit):
        return print_poly(t.poly)
    if isinstance(t, Add):
        return "(+ " + " ".join(map(print_term, t.items)) + ")"
    if isinstance(t, Mul):
        return "(* " + " ".join(map(print_term, t.items)) + ")"
    if isinstance(t, Pow):
        return f"(^ {print_term(t.base)} {t.exp})"
    return "(@ " + " ".join([t.name, *map(print_term, t.args)]) + ")"


def term_from_sexpr(node) -> Term:
    if isinstance(node, Atom):
        tok = node.text
        if INT_RE.match(tok):
            return Lit(Poly.const(int(tok)))
        if VAR_RE.match(tok):
            return Lit(Poly.var(tok))
        raise ParseError(f"expected integer or variable, got {tok!r}", node.line, node.col)
    items = node.items
    if not items or not isinstance(items[0], Atom):
        raise ParseError("expected an operator", node.line, node.col)
    op, args = items[0].text, items[1:]
    if op == "+" and args:
        return add(*map(term_from_sexpr, args))
    if op == "*" and args:
        return mul(*map(term_from_sexpr, args))
    if op == "-" and len(args) == 2:
        return sub(term_from_sexpr(args[0]), term_from_sexpr(args[1]))
    if op == "^" and len(args) == 2:
        return power(term_from_sexpr(args[0]), parse_exponent(args[1]))
    if op == "@" and args and isinstance(args[0], Atom) and VAR_RE.match(args[0].text):
        return Call(args[0].text, tuple(map(term_from_sexpr, args[1:])))
    raise ParseError(f"malformed ({op} ...) term", node.line, node.col)


def parse_term(text: str) -> Term:
    return term_from_sexpr(read(text))


# -- compiled evaluation ------------------------------------------------------


def compile_poly(p: Poly) -> Callable[[Mapping[str, int]], int]:
    """Compile ``p`` into a Python function of an environment mapping."""
    names = p.variables
    if not names:
        value = p.constant_term()
        return lambda env: value
    pieces = []
    for exps, c in p.term_items():
        factors = [repr(c)] + [
            f"v{i}" if e == 1 else f"v{i}**{e}" for i, e in enumerate(exps) if e
        ]
        pieces.append("*".join(factors))
    loads = "\n".join(f"    v{i} = env[{n!r}]" for i, n in enumerate(names))
    # Long sums are split into several statements; one huge expression
    # overflows the compiler's recursion limit.
    chunks = [" + ".join(pieces[i : i + 200]) for i in range(0, len(pieces), 200)]
    body = "\n".join(f"    s += {chunk}" for chunk in chunks)
    src = f"def _f(env):\n{loads}\n    s = 0\n{body}\n    return s\n"
    scope: dict = {}
    exec(src, scope)
    fast = scope["_f"]

    def run(env):
        try:
            return fast(env)
        except KeyError as exc:
            raise MissingVariableError(exc.args[0]) from None

    return run


def compile_term(t: Term, funcs: Mapping[str, Callable[..., int]]):
    if isinstance(t, Lit):
        return compile_poly(t.poly)
    if isinstance(t, (Add, Mul)):
        parts = [compile_term(u, funcs) for u in t.items]
        if isinstance(t, Add):
            return lambda env: sum(f(env) for f in parts)

        def product(env):
            acc = 1
            for f in parts:
                acc *= f(env)
                if not acc:
                    return 0
            return acc

        return product
    if isinstance(t, Pow):
        base, e = compile_term(t.base, funcs), t.exp
        return lambda env: base(env) ** e
    try:
        fn = funcs[t.name]
    except KeyError:
        raise KeyError(f"no implementation for function {t.name!r}") from None
    args = [compile_term(u, funcs) for u in t.args]
    return lambda env: fn(*(a(env) for a in args))


def eval_term(t, env: Mapping[str, int], funcs: Mapping | None = None) -> int:
    return compile_term(term(t), funcs or {})(env)


# -- formulas -----------------------------------------------------------------

RELATIONS = ("=", ">=", "/=")


class Formula:
    __slots__ = ()


@dataclass(frozen=True, eq=True)
class Rel(Formula):
    """``term rel 0`` with rel one of ``=``, ``>=``, ``/=``."""

    term: Term
    rel: str

    def __post_init__(self):
        if self.rel not in RELATIONS:
            raise ValueError(f"unknown relation {self.rel!r}")


@dataclass(frozen=True, eq=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True, eq=True)
class And(Formula):
    items: tuple


@dataclass(frozen=True, eq=True)
class Or(Formula):
    items: tuple


@dataclass(frozen=True, eq=True)
class Quant(Formula):
    kind: str  # "exists" or "forall"
    var: str
    bound: tuple | None  # (lo, hi) terms, inclusive
    body: Formula

    def __post_init__(self):
        if self.kind not in ("exists", "forall"):
            raise ValueError(f"unknown quantifier {self.kind!r}")
        if not VAR_RE.match(self.var):
            raise ValueError(f"bad variable name {self.var!r}")


@dataclass(frozen=True, eq=True)
class Free(Formula):
    """Declares designated free parameters of ``body``."""

    names: tuple
    body: Formula


def eq0(t) -> Rel:
    return Rel(term(t), "=")


def ge0(t) -> Rel:
    return Rel(term(t), ">=")


def ne0(t) -> Rel:
    return Rel(term(t), "/=")


def conj(*fs) -> Formula:
    return fs[0] if len(fs) == 1 else And(tuple(fs))


def disj(*fs) -> Formula:
    return fs[0] if len(fs) == 1 else Or(tuple(fs))


def exists(var: str, body: Formula, bound=None) -> Quant:
    return Quant("exists", var, _bound(bound), body)


def forall(var: str, body: Formula, bound=None) -> Quant:
    return Quant("forall", var, _bound(bound), body)


def _bound(bound):
    if bound is None:
        return None
    lo, hi = bound
    return (term(lo), term(hi))


def prenex(prefix: Sequence[tuple], matrix: Formula) -> Formula:
    """Wrap ``matrix`` in quantifiers; ``prefix`` has (kind, var[, bound]) items."""
    f = matrix
    for item in reversed(prefix):
        kind, var, bound = (*item, None)[:3]
        f = Quant(kind, var, _bound(bound), f)
    return f


def free_vars(f: Formula) -> frozenset:
    if isinstance(f, Rel):
        return f.term.free_vars()
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (And, Or)):
        return frozenset().union(*(free_vars(g) for g in f.items))
    if isinstance(f, Quant):
        inner = free_vars(f.body) - {f.var}
        if f.bound:
            inner |= f.bound[0].free_vars() | f.bound[1].free_vars()
        return inner
    return free_vars(f.body) - set(f.names)


def quantifier_prefix(f: Formula) -> list[Quant]:
    out = []
    while True:
        if isinstance(f, Free):
            f = f.body
        elif isinstance(f, Quant):
            out.append(f)
            f = f.body
        else:
            return out


def matrix(f: Formula) -> Formula:
    while isinstance(f, (Free, Quant)):
        f = f.body
    return f


def prefix_tag(f: Formula) -> str:
    """Run-length code of the leading quantifier block, e.g. ``E2A1E3``."""
    runs: list[list] = []
    for q in quantifier_prefix(f):
        letter = "E" if q.kind == "exists" else "A"
        if runs and runs[-1][0] == letter:
            runs[-1][1] += 1
        else:
            runs.append([letter, 1])
    return "".join(f"{k}{n}" for k, n in runs)


def print_formula(f: Formula) -> str:
    if isinstance(f, Rel):
        return f"({f.rel} {print_term(f.term)} 0)"
    if isinstance(f, Not):
        return f"(not {print_formula(f.body)})"
    if isinstance(f, (And, Or)):
        head = "and" if isinstance(f, And) else "or"
        return "(" + " ".join([head, *map(print_formula, f.items)]) + ")"
    if isinstance(f, Quant):
        if f.bound is None:
            binder = f.var
        else:
            binder = f"({f.var} {print_term(f.bound[0])} {print_term(f.bound[1])})"
        return f"({f.kind} {binder} {print_formula(f.body)})"
    return f"(free ({' '.join(f.names)}) {print_formula(f.body)})"


def formula_from_sexpr(node) -> Formula:
    if not isinstance(node, SList) or not node.items or not isinstance(node.items[0], Atom):
        raise ParseError("expected a formula", node.line, node.col)
    head, args = node.items[0].text, node.items[1:]
    if head in RELATIONS and len(args) == 2:
        return Rel(sub(term_from_sexpr(args[0]), term_from_sexpr(args[1])), head)
    if head == "not" and len(args) == 1:
        return Not(formula_from_sexpr(args[0]))
    if head in ("and", "or"):
        items = tuple(map(formula_from_sexpr, args))
        return And(items) if head == "and" else Or(items)
    if head in ("exists", "forall") and len(args) == 2:
        binder, body = args
        if isinstance(binder, Atom) and VAR_RE.match(binder.text):
            return Quant(head, binder.text, None, formula_from_sexpr(body))
        if (
            isinstance(binder, SList)
            and len(binder.items) == 3
            and isinstance(binder.items[0], Atom)
            and VAR_RE.match(binder.items[0].text)
        ):
            lo, hi = (term_from_sexpr(b) for b in binder.items[1:])
            return Quant(head, binder.items[0].text, (lo, hi), formula_from_sexpr(body))
        raise ParseError("malformed quantifier binder", binder.line, binder.col)
    if head == "free" and len(args) == 2 and isinstance(args[0], SList):
        names = []
        for a in args[0].items:
            if not (isinstance(a, Atom) and VAR_RE.match(a.text)):
                raise ParseError("bad free parameter", a.line, a.col)
            names.append(a.text)
        return Free(tuple(names), formula_from_sexpr(args[1]))
    raise ParseError(f"malformed ({head} ...) formula", node.line, node.col)


def parse_formula(text: str, free: Sequence[str] = ()) -> Formula:
    """Parse a formula; variables must be bound or listed in ``free``."""
    f = formula_from_sexpr(read(text))
    unbound = free_vars(f) - set(free)
    if unbound:
        raise UnboundVariableError(f"unbound variables: {', '.join(sorted(unbound))}")
    return f


# -- bounded evaluation -------------------------------------------------------


def _center_out(lo: int, hi: int):
    """Integers of [lo, hi] ordered by distance from the point nearest 0."""
    start = min(max(0, lo), hi)
    yield start
    step = 1
    while start - step >= lo or start + step <= hi:
        if start + step <= hi:
            yield start + step
        if start - step >= lo:
            yield start - step
        step += 1


def compile_formula(f: Formula, box: Mapping[str, tuple[int, int]], funcs: Mapping):
    if isinstance(f, Rel):
        t = compile_term(f.term, funcs)
        if f.rel == "=":
            return lambda env: t(env) == 0
        if f.rel == ">=":
            return lambda env: t(env) >= 0
        return lambda env: t(env) != 0
    if isinstance(f, Not):
        g = compile_formula(f.body, box, funcs)
        return lambda env: not g(env)
    if isinstance(f, (And, Or)):
        gs = [compile_formula(h, box, funcs) for h in f.items]
        if isinstance(f, And):
            return lambda env: all(g(env) for g in gs)
        return lambda env: any(g(env) for g in gs)
    if isinstance(f, Free):
        return compile_formula(f.body, box, funcs)
    body = compile_formula(f.body, box, funcs)
    var, is_exists = f.var, f.kind == "exists"
    limits = box.get(var)
    if f.bound is None and limits is None:
        raise BoxError(f"unbounded quantifier over {var!r} needs a box entry")
    lo_f = compile_term(f.bound[0], funcs) if f.bound else None
    hi_f = compile_term(f.bound[1], funcs) if f.bound else None

    def quant(env):
        if lo_f is not None:
            lo, hi = lo_f(env), hi_f(env)
            if limits is not None:
                lo, hi = max(lo, limits[0]), min(hi, limits[1])
        else:
            lo, hi = limits
        if lo > hi:
            return not is_exists
        saved = env.get(var, _MISSING)
        try:
            for value in _center_out(lo, hi):
                env[var] = value
                if body(env) == is_exists:
                    return is_exists
            return not is_exists
        finally:
            if saved is _MISSING:
                env.pop(var, None)
            else:
                env[var] = saved

    return quant


_MISSING = object()


def eval_bounded(
    f: Formula,
    free: Mapping[str, int] | None = None,
    box: Mapping[str, tuple[int, int]] | None = None,
    funcs: Mapping[str, Callable[..., int]] | None = None,
) -> bool:
    """Truth value of ``f`` with every quantifier ranging over a finite set.

    Unbounded quantifiers range over ``box[var]``; bounded ones over their own
    bounds intersected with ``box[var]`` when present.  An empty range makes a
    universal true and an existential false."""
    free = dict(free or {})
    missing = free_vars(f) - set(free)
    if missing:
        raise MissingVariableError(sorted(missing)[0])
    return compile_formula(f, box or {}, funcs or {})(free)
