"""Exact integer polynomials: sparse multivariate ``Poly`` and dense ``UniPoly``.

Coefficients are Python ints, so arithmetic never overflows or rounds.
Rationals are ``fractions.Fraction`` (always reduced, positive denominator).

A ``Poly`` stores its variables as a sorted tuple of names and its terms as a
dict from a packed exponent key to a nonzero coefficient.  Exponent ``e_i`` of
the ``i``-th variable occupies bits ``[32 i, 32 i + 32)`` of the key, so
multiplying monomials is integer addition of keys.

Textual grammar (S-expressions)::

    poly := int | var | (+ poly+) | (* poly+) | (- poly poly) | (^ var uint)
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Mapping

from .sexpr import Atom, ParseError, SList, read

SLOT = 32
MASK = (1 << SLOT) - 1
MAX_EXPONENT = MASK

INT_RE = re.compile(r"-?[0-9]+\Z")
UINT_RE = re.compile(r"[0-9]+\Z")
VAR_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")

Monomial = tuple  # tuple of (name, exponent) pairs sorted by name


class ExponentOverflowError(ParseError):
    pass


class MissingVariableError(KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self):
        return f"no value assigned to variable {self.name!r}"


class ZeroPolynomialError(ValueError):
    pass


def _unpack(key: int, n: int) -> list[int]:
    return [(key >> (SLOT * i)) & MASK for i in range(n)]


def _pack(exps: Iterable[int]) -> int:
    key = 0
    for i, e in enumerate(exps):
        if e > MAX_EXPONENT:
            raise OverflowError(f"exponent {e} exceeds {MAX_EXPONENT}")
        key |= e << (SLOT * i)
    return key


def _max_degrees(terms: Mapping[int, int], n: int) -> list[int]:
    degs = [0] * n
    for key in terms:
        for i in range(n):
            e = (key >> (SLOT * i)) & MASK
            if e > degs[i]:
                degs[i] = e
    return degs


class Poly:
    """Immutable sparse polynomial in named variables with int coefficients."""

    __slots__ = ("_vars", "_terms", "_hash")

    def __init__(self, vars: tuple[str, ...] = (), terms: dict[int, int] | None = None):
        # Internal constructor: callers guarantee sorted vars and nonzero coefficients.
        self._vars = vars
        self._terms = terms if terms is not None else {}
        self._hash = None

    # -- construction -----------------------------------------------------

    @classmethod
    def const(cls, value: int) -> "Poly":
        value = int(value)
        return cls((), {0: value} if value else {})

    @classmethod
    def var(cls, name: str) -> "Poly":
        if not VAR_RE.match(name):
            raise ValueError(f"invalid variable name {name!r}")
        return cls((name,), {1: 1})

    @classmethod
    def from_terms(cls, terms: Mapping) -> "Poly":
        """Build from ``{monomial: coeff}``; a monomial is a dict or pair-tuple."""
        names: set[str] = set()
        items = []
        for mono, coeff in terms.items():
            mono = dict(mono)
            names.update(v for v, e in mono.items() if e)
            items.append((mono, int(coeff)))
        vars = tuple(sorted(names))
        out: dict[int, int] = {}
        for mono, coeff in items:
            if any(e < 0 for e in mono.values()):
                raise ValueError("negative exponent")
            key = _pack(mono.get(v, 0) for v in vars)
            out[key] = out.get(key, 0) + coeff
        return cls._normalized(vars, out)

    @classmethod
    def _normalized(cls, vars: tuple[str, ...], terms: dict[int, int]) -> "Poly":
        terms = {k: c for k, c in terms.items() if c}
        if vars:
            degs = _max_degrees(terms, len(vars))
            if not all(degs):
                keep = [i for i, d in enumerate(degs) if d]
                new_terms = {}
                for key, c in terms.items():
                    exps = _unpack(key, len(vars))
                    new_terms[_pack(exps[i] for i in keep)] = c
                return cls(tuple(vars[i] for i in keep), new_terms)
        return cls(vars, terms)

    @staticmethod
    def coerce(value) -> "Poly":
        if isinstance(value, Poly):
            return value
        if isinstance(value, int):
            return Poly.const(value)
        if isinstance(value, UniPoly):
            return value.to_poly()
        raise TypeError(f"cannot convert {type(value).__name__} to Poly")

    # -- inspection -------------------------------------------------------

    @property
    def variables(self) -> tuple[str, ...]:
        return self._vars

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._vars

    def constant_term(self) -> int:
        return self._terms.get(0, 0)

    def terms(self) -> dict[Monomial, int]:
        n = len(self._vars)
        out = {}
        for key, c in self._terms.items():
            exps = _unpack(key, n)
            out[tuple((v, e) for v, e in zip(self._vars, exps) if e)] = c
        return out

    def term_items(self) -> list[tuple[tuple[int, ...], int]]:
        """``(exponent vector aligned with .variables, coeff)`` pairs."""
        n = len(self._vars)
        return [(tuple(_unpack(k, n)), c) for k, c in self._terms.items()]

    def degree(self, vars: Iterable[str] | None = None) -> int:
        """Total degree, optionally counting only the variables in ``vars``."""
        if not self._terms:
            return -1
        n = len(self._vars)
        idx = range(n) if vars is None else [i for i, v in enumerate(self._vars) if v in set(vars)]
        best = 0
        for key in self._terms:
            d = sum((key >> (SLOT * i)) & MASK for i in idx)
            if d > best:
                best = d
        return best

    def degree_in(self, var: str) -> int:
        if not self._terms:
            return -1
        if var not in self._vars:
            return 0
        return _max_degrees(self._terms, len(self._vars))[self._vars.index(var)]

    def leading_coefficient_in(self, var: str) -> "Poly":
        """Coefficient of the highest power of ``var``, as a Poly in the other variables."""
        if var not in self._vars:
            return self
        i = self._vars.index(var)
        shift = SLOT * i
        top = self.degree_in(var)
        strip = top << shift
        lead = {k - strip: c for k, c in self._terms.items() if (k >> shift) & MASK == top}
        rest = self._vars[:i] + self._vars[i + 1 :]
        # dropping slot i moves the higher slots down by one
        low = (1 << shift) - 1
        packed = {(k & low) | ((k >> (shift + SLOT)) << shift): c for k, c in lead.items()}
        return Poly._normalized(rest, packed)

    def coefficients_in(self, vars: Iterable[str]) -> dict[tuple[int, ...], "Poly"]:
        """Split as ``sum_e coeff_e * vars^e``; coefficients are Polys in the remaining variables."""
        vars = tuple(vars)
        sel = [self._vars.index(v) if v in self._vars else None for v in vars]
        rest = tuple(v for v in self._vars if v not in vars)
        rest_idx = [self._vars.index(v) for v in rest]
        n = len(self._vars)
        groups: dict[tuple[int, ...], dict[int, int]] = {}
        for key, c in self._terms.items():
            exps = _unpack(key, n)
            e = tuple(exps[i] if i is not None else 0 for i in sel)
            groups.setdefault(e, {})[_pack(exps[i] for i in rest_idx)] = c
        return {e: Poly._normalized(rest, t) for e, t in groups.items()}

    # -- arithmetic -------------------------------------------------------

    def _aligned(self, other: "Poly"):
        if self._vars == other._vars:
            return self._vars, self._terms, other._terms
        vars = tuple(sorted(set(self._vars) | set(other._vars)))
        return vars, self._remap(vars), other._remap(vars)

    def _remap(self, vars: tuple[str, ...]) -> dict[int, int]:
        if vars == self._vars:
            return self._terms
        shifts = [SLOT * vars.index(v) for v in self._vars]
        n = len(self._vars)
        out = {}
        for key, c in self._terms.items():
            new = 0
            for i in range(n):
                new |= ((key >> (SLOT * i)) & MASK) << shifts[i]
            out[new] = c
        return out

    def __add__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        vars, a, b = self._aligned(other)
        out = dict(a)
        for k, c in b.items():
            out[k] = out.get(k, 0) + c
        return Poly._normalized(vars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self._vars, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        if not self._terms or not other._terms:
            return Poly()
        vars, a, b = self._aligned(other)
        n = len(vars)
        da, db = _max_degrees(a, n), _max_degrees(b, n)
        if any(x + y > MAX_EXPONENT for x, y in zip(da, db)):
            raise OverflowError("exponent overflow in product")
        return Poly._normalized(vars, _mul_terms(a, b))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise ValueError("exponent must be a nonnegative int")
        result = Poly.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def scale(self, k: int) -> "Poly":
        if not k:
            return Poly()
        return Poly(self._vars, {key: c * k for key, c in self._terms.items()})

    # -- evaluation and substitution --------------------------------------

    def eval(self, assignment: Mapping[str, int]):
        values = []
        for v in self._vars:
            try:
                values.append(assignment[v])
            except KeyError:
                raise MissingVariableError(v) from None
        n = len(values)
        cache: dict[tuple[int, int], int] = {}
        total = 0
        for key, c in self._terms.items():
            term = c
            for i in range(n):
                e = (key >> (SLOT * i)) & MASK
                if e:
                    pv = cache.get((i, e))
                    if pv is None:
                        pv = values[i] ** e
                        cache[(i, e)] = pv
                    term *= pv
            total += term
        return total

    __call__ = eval

    def substitute(self, var: str, replacement) -> "Poly":
        """Replace ``var`` by the polynomial ``replacement``."""
        return self.substitute_all({var: replacement})

    def substitute_all(self, mapping: Mapping[str, "Poly | int"]) -> "Poly":
        """Simultaneous substitution of several variables."""
        mapping = {v: Poly.coerce(r) for v, r in mapping.items() if v in self._vars}
        if not mapping:
            return self
        names = tuple(mapping)
        groups = self.coefficients_in(names)
        vars = set(v for v in self._vars if v not in mapping)
        for r in mapping.values():
            vars.update(r._vars)
        vars = tuple(sorted(vars))
        remapped = {v: r._remap(vars) for v, r in mapping.items()}
        # Powers are built by repeated multiplication by the (usually small)
        # replacement; squaring large intermediate powers is far costlier.
        powers: dict[str, list[dict[int, int]]] = {v: [{0: 1}] for v in names}

        def power(v, e):
            table = powers[v]
            while len(table) <= e:
                table.append(_mul_terms(table[-1], remapped[v]))
            return table[e]

        out: dict[int, int] = {}
        for exps, coeff in groups.items():
            term = coeff._remap(vars)
            factors = [power(v, e) for v, e in zip(names, exps) if e]
            for f in factors[:-1]:
                term = _mul_terms(term, f)
            if factors:
                _mul_terms(term, factors[-1], out)
            else:
                for k, c in term.items():
                    out[k] = out.get(k, 0) + c
        return Poly._normalized(vars, out)

    def rename(self, mapping: Mapping[str, str]) -> "Poly":
        return self.substitute_all({old: Poly.var(new) for old, new in mapping.items()})

    # -- comparison -------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, int):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self._vars == other._vars and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._vars, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"Poly({print_poly(self)!r})"

    def __str__(self):
        return print_poly(self)


def _mul_terms(a: dict[int, int], b: dict[int, int], out: dict[int, int] | None = None) -> dict[int, int]:
    """Multiply packed term dicts over the same variables, accumulating into ``out``."""
    if out is None:
        out = {}
    if len(a) < len(b):
        a, b = b, a
    a_items = list(a.items())
    for kb, cb in b.items():
        for ka, ca in a_items:
            k = ka + kb
            if k in out:
                out[k] += ca * cb
            else:
                out[k] = ca * cb
    return out


def _coerce_or_none(value):
    if isinstance(value, Poly):
        return value
    if isinstance(value, int):
        return Poly.const(value)
    return None


def var(name: str) -> Poly:
    return Poly.var(name)


def variables(*names: str) -> tuple[Poly, ...]:
    return tuple(Poly.var(n) for n in names)


def _sorted_terms(p: Poly) -> list[tuple[tuple[int, ...], int]]:
    # Graded lexicographic, highest first, variables ordered by name.
    return sorted(p.term_items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)


def print_poly(p: Poly) -> str:
    """Canonical S-expression for ``p`` (fully expanded, grlex term order)."""
    terms = _sorted_terms(p)
    if not terms:
        return "0"
    parts = []
    for exps, c in terms:
        factors = [
            v if e == 1 else f"(^ {v} {e})" for v, e in zip(p.variables, exps) if e
        ]
        if not factors:
            parts.append(str(c))
        elif c == 1 and len(factors) == 1:
            parts.append(factors[0])
        elif c == 1:
            parts.append("(* " + " ".join(factors) + ")")
        else:
            parts.append(f"(* {c} " + " ".join(factors) + ")")
    if len(parts) == 1:
        return parts[0]
    return "(+ " + " ".join(parts) + ")"


def parse_poly(text: str) -> Poly:
    return poly_from_sexpr(read(text))


def poly_from_sexpr(node) -> Poly:
    if isinstance(node, Atom):
        tok = node.text
        if INT_RE.match(tok):
            return Poly.const(int(tok))
        if VAR_RE.match(tok):
            return Poly.var(tok)
        raise ParseError(f"expected integer or variable, got {tok!r}", node.line, node.col)
    items = node.items
    if not items or not isinstance(items[0], Atom):
        raise ParseError("expected an operator", node.line, node.col)
    op = items[0].text
    args = items[1:]
    if op == "+" and args:
        result = Poly()
        for a in args:
            result = result + poly_from_sexpr(a)
        return result
    if op == "*" and args:
        result = Poly.const(1)
        for a in args:
            result = result * poly_from_sexpr(a)
        return result
    if op == "-" and len(args) == 2:
        return poly_from_sexpr(args[0]) - poly_from_sexpr(args[1])
    if op == "^" and len(args) == 2:
        base, exp = args
        if not (isinstance(base, Atom) and VAR_RE.match(base.text)):
            raise ParseError("'^' base must be a variable", node.line, node.col)
        return Poly.var(base.text) ** parse_exponent(exp)
    raise ParseError(f"malformed ({op} ...) form", node.line, node.col)


def parse_exponent(node) -> int:
    if not (isinstance(node, Atom) and UINT_RE.match(node.text)):
        raise ParseError("exponent must be an unsigned integer", node.line, node.col)
    e = int(node.text)
    if e > MAX_EXPONENT:
        raise ExponentOverflowError(f"exponent {e} exceeds {MAX_EXPONENT}", node.line, node.col)
    return e


# -- univariate -----------------------------------------------------------


class UniPoly:
    """Dense univariate integer polynomial, coefficients lowest degree first."""

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Iterable[int] = (), var: str = "x"):
        coeffs = [int(c) for c in coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coeffs = tuple(coeffs)
        self.var = var

    @classmethod
    def from_poly(cls, p: Poly, var: str | None = None) -> "UniPoly":
        if len(p.variables) > 1 or (var is not None and p.variables not in ((), (var,))):
            raise ValueError(f"not univariate in {var or 'a single variable'}: {p}")
        name = var or (p.variables[0] if p.variables else "x")
        coeffs = [0] * (p.degree() + 1)
        for exps, c in p.term_items():
            coeffs[exps[0] if exps else 0] = c
        return cls(coeffs, name)

    def to_poly(self) -> Poly:
        return Poly.from_terms({((self.var, i),): c for i, c in enumerate(self.coeffs) if c})

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_monic(self) -> bool:
        return self.lc == 1

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def _lift(self, other):
        if isinstance(other, UniPoly):
            return other.coeffs
        if isinstance(other, int):
            return (other,)
        return None

    def __add__(self, other):
        b = self._lift(other)
        if b is None:
            return NotImplemented
        a = self.coeffs
        n = max(len(a), len(b))
        return UniPoly([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)], self.var)

    __radd__ = __add__

    def __neg__(self):
        return UniPoly([-c for c in self.coeffs], self.var)

    def __sub__(self, other):
        b = self._lift(other)
        if b is None:
            return NotImplemented
        return self + (-UniPoly(b, self.var))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        b = self._lift(other)
        if b is None:
            return NotImplemented
        a = self.coeffs
        if not a or not b:
            return UniPoly((), self.var)
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return UniPoly(out, self.var)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result = UniPoly((1,), self.var)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def derivative(self) -> "UniPoly":
        return UniPoly([i * c for i, c in enumerate(self.coeffs)][1:], self.var)

    def coefficient(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def cauchy_bound(self) -> int:
        """Integer ``N`` with every complex root ``r`` satisfying ``|r| <= N``."""
        if self.degree < 1:
            return 0
        lc = abs(self.lc)
        return 1 + max(-(-abs(c) // lc) for c in self.coeffs[:-1])

    def __eq__(self, other):
        if isinstance(other, UniPoly):
            return self.coeffs == other.coeffs and (self.var == other.var or len(self.coeffs) <= 1)
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"UniPoly({list(self.coeffs)!r}, var={self.var!r})"

    def __str__(self):
        return print_poly(self.to_poly())


# -- integer helpers ------------------------------------------------------


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def iroot(n: int, k: int) -> int:
    """Floor of the real ``k``-th root of ``n >= 0``."""
    if n < 0 or k < 1:
        raise ValueError("iroot needs n >= 0 and k >= 1")
    if n < 2 or k == 1:
        return n
    if k == 2:
        return math.isqrt(n)
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def rat_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


# -- integer roots --------------------------------------------------------


def _qpoly_divmod(a: list[Fraction], b: list[Fraction]):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and any(a):
        shift = len(a) - len(b)
        factor = a[-1] / b[-1]
        q[shift] = factor
        for i, c in enumerate(b):
            a[i + shift] -= factor * c
        a.pop()
        while a and a[-1] == 0:
            a.pop()
    return q, a


def _squarefree(coeffs: tuple[int, ...]) -> list[int]:
    f = [Fraction(c) for c in coeffs]
    df = [Fraction(i * c) for i, c in enumerate(coeffs)][1:]
    a, b = f, df
    while b:
        _, r = _qpoly_divmod(a, b)
        a, b = b, r
    if len(a) <= 1:
        return list(coeffs)
    q, _ = _qpoly_divmod(f, a)
    while q and q[-1] == 0:
        q.pop()
    den = 1
    for c in q:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in q]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    return [c // g for c in ints]


def _small_primes():
    p = 3
    while True:
        if all(p % d for d in range(3, math.isqrt(p) + 1, 2)):
            yield p
        p += 2


def _eval_mod(coeffs, x, m):
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % m
    return acc


def integer_roots(p: UniPoly) -> set[int]:
    """All integer zeros of ``p``.

    Zero is split off first.  The remaining squarefree part has simple roots
    modulo a suitable prime, which are Hensel-lifted past twice the Cauchy
    bound and then checked exactly.
    """
    if p.is_zero():
        raise ZeroPolynomialError("the zero polynomial has every integer as a root")
    coeffs = p.coeffs
    roots: set[int] = set()
    shift = 0
    while coeffs[shift] == 0:
        shift += 1
    if shift:
        roots.add(0)
        coeffs = coeffs[shift:]
    if len(coeffs) == 1:
        return roots
    if len(coeffs) == 2:
        c0, c1 = coeffs
        if c0 % c1 == 0:
            roots.add(-c0 // c1)
        return roots
    f = _squarefree(coeffs)
    df = [i * c for i, c in enumerate(f)][1:]
    bound = UniPoly(f).cauchy_bound()
    for prime in _small_primes():
        if f[-1] % prime == 0:
            continue
        residues = [x for x in range(prime) if _eval_mod(f, x, prime) == 0]
        if all(_eval_mod(df, r, prime) for r in residues):
            break
    modulus = prime
    lifted = residues
    while modulus <= 2 * bound:
        modulus = modulus * modulus
        lifted = [
            (r - _eval_mod(f, r, modulus) * pow(_eval_mod(df, r, modulus), -1, modulus)) % modulus
            for r in lifted
        ]
    big = UniPoly(f)
    for r in lifted:
        if r > modulus // 2:
            r -= modulus
        if r and big(r) == 0:
            roots.add(r)
    return roots
