"""Exact sparse multivariate polynomial and rational-function arithmetic.

A polynomial is a dict from exponent tuples (one non-negative int per
parameter slot) to nonzero ``Fraction`` coefficients; the zero polynomial is
the empty dict.  A rational function is a reduced fraction of two such
polynomials in a unique normal form:

* polynomial gcd cancelled,
* both parts scaled to coprime integer coefficients,
* denominator leading coefficient positive (graded-lex leading term).

Parameters live in slots 0..s-1 and print as ``T2..T{s+1}``, matching the
convention that the parameter attached to the i-th series variable is T_i
and the first variable carries the uniformizer itself.

Everything here is immutable after construction and safe to share.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from .errors import PoleError, SpecParseError, StructuralError

Exponent = tuple  # tuple[int, ...], one entry per parameter slot


def _grlex_key(exp: Exponent):
    return (sum(exp), exp)


class Poly:
    """Sparse polynomial over Q with a fixed graded-lex term order."""

    __slots__ = ("nvars", "terms")

    VAR_PREFIX = "T"
    VAR_OFFSET = 2  # slot 0 prints as T2

    def __init__(self, nvars: int, terms: Optional[Mapping[Exponent, object]] = None):
        self.nvars = nvars
        clean = {}
        if terms:
            for exp, coeff in terms.items():
                if len(exp) != nvars:
                    raise StructuralError(
                        f"exponent {exp} has arity {len(exp)}, expected {nvars}")
                c = coeff if isinstance(coeff, Fraction) else Fraction(coeff)
                if c:
                    clean[tuple(exp)] = c
        self.terms = clean

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls(nvars)

    @classmethod
    def const(cls, nvars: int, value) -> "Poly":
        return cls(nvars, {(0,) * nvars: Fraction(value)})

    @classmethod
    def one(cls, nvars: int) -> "Poly":
        return cls.const(nvars, 1)

    @classmethod
    def var(cls, nvars: int, slot: int, power: int = 1) -> "Poly":
        if not 0 <= slot < nvars:
            raise StructuralError(f"variable slot {slot} out of range 0..{nvars - 1}")
        exp = [0] * nvars
        exp[slot] = power
        return cls(nvars, {tuple(exp): Fraction(1)})

    # -- predicates ----------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and (0,) * self.nvars in self.terms)

    def const_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_const():
            raise StructuralError("not a constant polynomial")
        return self.terms[(0,) * self.nvars]

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def leading(self) -> tuple:
        """(exponent, coefficient) of the graded-lex leading term."""
        if not self.terms:
            raise StructuralError("zero polynomial has no leading term")
        exp = max(self.terms, key=_grlex_key)
        return exp, self.terms[exp]

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    # -- ring operations -----------------------------------------------

    def _check(self, other: "Poly") -> None:
        if self.nvars != other.nvars:
            raise StructuralError(
                f"parameter arity mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        out = dict(self.terms)
        for exp, c in other.terms.items():
            s = out.get(exp, 0) + c
            if s:
                out[exp] = s
            else:
                out.pop(exp, None)
        return type(self)(self.nvars, out)

    def __neg__(self) -> "Poly":
        return type(self)(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        self._check(other)
        if not self.terms or not other.terms:
            return type(self).zero(self.nvars)
        out: dict = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                exp = tuple(x + y for x, y in zip(ea, eb))
                s = out.get(exp, 0) + ca * cb
                if s:
                    out[exp] = s
                else:
                    out.pop(exp, None)
        return type(self)(self.nvars, out)

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        if not c:
            return type(self).zero(self.nvars)
        return type(self)(self.nvars, {e: v * c for e, v in self.terms.items()})

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise StructuralError("negative polynomial power")
        result = type(self).one(self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    # -- calculus / evaluation ------------------------------------------

    def derivative(self, slot: int) -> "Poly":
        out = {}
        for exp, c in self.terms.items():
            k = exp[slot]
            if k:
                e = list(exp)
                e[slot] = k - 1
                key = tuple(e)
                s = out.get(key, 0) + c * k
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return type(self)(self.nvars, out)

    def evaluate(self, point) -> Fraction:
        vals = [Fraction(p) for p in point]
        if len(vals) != self.nvars:
            raise StructuralError(
                f"point has arity {len(vals)}, expected {self.nvars}")
        total = Fraction(0)
        for exp, c in self.terms.items():
            term = c
            for v, k in zip(vals, exp):
                if k:
                    term *= v ** k
            total += term
        return total

    # -- division ---------------------------------------------------------

    def exact_div(self, other: "Poly") -> "Poly":
        """Quotient self/other when divisibility is known; raises otherwise."""
        self._check(other)
        if not other.terms:
            raise ZeroDivisionError("polynomial division by zero")
        if not self.terms:
            return Poly.zero(self.nvars)
        rem = dict(self.terms)
        le, lc = other.leading()
        quo: dict = {}
        while rem:
            exp = max(rem, key=_grlex_key)
            diff = tuple(a - b for a, b in zip(exp, le))
            if any(d < 0 for d in diff):
                raise StructuralError("not an exact polynomial division")
            q = rem[exp] / lc
            quo[diff] = quo.get(diff, 0) + q
            for eb, cb in other.terms.items():
                key = tuple(a + b for a, b in zip(diff, eb))
                s = rem.get(key, 0) - q * cb
                if s:
                    rem[key] = s
                else:
                    rem.pop(key, None)
        return type(self)(self.nvars, quo)

    def divides(self, other: "Poly") -> bool:
        try:
            other.exact_div(self)
            return True
        except StructuralError:
            return False

    # -- content and normal form ------------------------------------------

    def content(self) -> Fraction:
        """Positive rational c with self/c having coprime integer coefficients."""
        if not self.terms:
            return Fraction(1)
        num_gcd = 0
        den_lcm = 1
        for c in self.terms.values():
            num_gcd = math.gcd(num_gcd, abs(c.numerator))
            den_lcm = den_lcm * c.denominator // math.gcd(den_lcm, c.denominator)
        return Fraction(num_gcd, den_lcm)

    def monic(self) -> "Poly":
        if not self.terms:
            return self
        _, lc = self.leading()
        return self.scale(1 / lc)

    # -- rendering ----------------------------------------------------------

    def render(self) -> str:
        """Deterministic compact string, graded-lex descending, no spaces."""
        if not self.terms:
            return "0"
        parts = []
        for exp in sorted(self.terms, key=_grlex_key, reverse=True):
            c = self.terms[exp]
            factors = []
            for slot, k in enumerate(exp):
                if k == 0:
                    continue
                name = f"{self.VAR_PREFIX}{slot + self.VAR_OFFSET}"
                factors.append(name if k == 1 else f"{name}^{k}")
            mag = abs(c)
            if not factors:
                body = _frac_str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([_frac_str(mag)] + factors)
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = (first_body if first_sign == "+" else "-" + first_body)
        for sign, body in parts[1:]:
            out += sign + body
        return out

    def __repr__(self):
        return f"<{type(self).__name__} {self.render()}>"


def _frac_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


class XVarPoly(Poly):
    """Polynomial displayed in the series variables X1..Xn."""

    __slots__ = ()
    VAR_PREFIX = "X"
    VAR_OFFSET = 1


# -- polynomial gcd -----------------------------------------------------------


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd of two polynomials; gcd(a, 0) is a made monic."""
    if not a and not b:
        raise StructuralError("gcd(0, 0) is undefined")
    a._check(b)
    return _gcd(a, b).monic()


def _min_exponent(p: Poly) -> Exponent:
    mins = None
    for exp in p.terms:
        mins = exp if mins is None else tuple(min(x, y) for x, y in zip(mins, exp))
    return mins


def _gcd(a: Poly, b: Poly) -> Poly:
    if not a:
        return b
    if not b:
        return a
    kind = type(a)
    if a.is_const() or b.is_const():
        return kind.one(a.nvars)
    if len(a.terms) == 1 or len(b.terms) == 1:
        mono = tuple(min(x, y) for x, y in zip(_min_exponent(a), _min_exponent(b)))
        return kind(a.nvars, {mono: Fraction(1)})
    if a.terms == b.terms:
        return a
    vars_a = {i for e in a.terms for i in range(a.nvars) if e[i]}
    vars_b = {i for e in b.terms for i in range(a.nvars) if e[i]}
    common = vars_a & vars_b
    if not common:
        return kind.one(a.nvars)
    if _certified_coprime(a, b, common):
        return kind.one(a.nvars)
    v = max(common)
    ca, pa = _content_pp(a, v)
    cb, pb = _content_pp(b, v)
    cont = _gcd(ca, cb)
    f, g = (pa, pb) if _deg(pa, v) >= _deg(pb, v) else (pb, pa)
    while g:
        r = _prem(f, g, v)
        f = g
        g = _pp(r, v) if r else kind.zero(a.nvars)
    return cont * _pp(f, v)


def _deg(p: Poly, v: int) -> int:
    return max((e[v] for e in p.terms), default=0)


# deterministic specialization points for the coprimality certificate
_CERT_POINTS = ((2, 3, 5, 7, 11, 13, 17, 19), (3, 5, 7, 11, 13, 17, 19, 23),
                (5, 7, 11, 2, 3, 13, 19, 29), (7, 11, 2, 5, 13, 3, 23, 31))


def _certified_coprime(a: Poly, b: Poly, common) -> bool:
    """True only with proof that gcd(a, b) is constant.

    Any common divisor g satisfies, for each variable v: whenever the leading
    v-coefficient of a survives a specialization of the other variables,
    deg_v(g) is at most the degree of the specialized univariate gcd.  A zero
    bound for every shared variable pins g to a constant.  Failure to certify
    just falls back to the full remainder sequence.
    """
    for v in common:
        if not _variable_ruled_out(a, b, v):
            return False
    return True


def _variable_ruled_out(a: Poly, b: Poly, v: int) -> bool:
    for points in _CERT_POINTS:
        ua, lead_a = _specialize_keep(a, v, points)
        if lead_a == 0:
            continue
        ub, _ = _specialize_keep(b, v, points)
        if not ub:
            continue
        if _uni_gcd_degree(ua, ub) == 0:
            return True
    return False


def _specialize_keep(p: Poly, v: int, points) -> tuple:
    """Evaluate all variables but v; returns (dense coeffs, top-degree value).

    The second component is the specialized leading v-coefficient, which must
    be nonzero for the degree bound on the gcd to apply.
    """
    deg = _deg(p, v)
    dense = [Fraction(0)] * (deg + 1)
    for exp, c in p.terms.items():
        val = c
        for slot, k in enumerate(exp):
            if slot != v and k:
                val *= Fraction(points[slot % len(points)]) ** k
        dense[exp[v]] += val
    top = dense[deg]
    while dense and not dense[-1]:
        dense.pop()
    return dense, top


def _uni_gcd_degree(a: list, b: list) -> int:
    """Degree of gcd of two dense univariate rational polynomials."""
    while b:
        inv = 1 / b[-1]
        bm = [c * inv for c in b]
        r = list(a)
        while len(r) >= len(bm) and r:
            lead = r[-1]
            if lead:
                off = len(r) - len(bm)
                for i, c in enumerate(bm):
                    r[off + i] -= lead * c
            r.pop()
        while r and not r[-1]:
            r.pop()
        a, b = bm, r
    return len(a) - 1


def _coeffs_in(p: Poly, v: int) -> dict:
    """View p as univariate in slot v: degree -> Poly coefficient."""
    out: dict = {}
    for exp, c in p.terms.items():
        k = exp[v]
        e = list(exp)
        e[v] = 0
        out.setdefault(k, {})[tuple(e)] = c
    return {k: type(p)(p.nvars, t) for k, t in out.items()}


def _content_pp(p: Poly, v: int):
    coeffs = _coeffs_in(p, v)
    items = sorted(coeffs.values(), key=lambda q: len(q.terms))
    cont = items[0]
    for q in items[1:]:
        if cont.is_const():
            break
        cont = _gcd(cont, q)
    if cont.is_const():
        cont = type(p).one(p.nvars)
        return cont, p
    return cont, p.exact_div(cont)


def _pp(p: Poly, v: int) -> Poly:
    if not p:
        return p
    _, pp = _content_pp(p, v)
    return pp


def _lead_in(p: Poly, v: int):
    coeffs = _coeffs_in(p, v)
    d = max(coeffs)
    return d, coeffs[d]


def _strip_content(p: Poly) -> Poly:
    """Scale to coprime integer coefficients (a unit multiple of p)."""
    if not p:
        return p
    return p.scale(1 / p.content())


def _prem(f: Poly, g: Poly, v: int) -> Poly:
    """Remainder of f by g viewed in slot v, up to a unit.

    Content is stripped after every reduction step; the PRS only consumes
    primitive parts, so unit factors are free and keeping coefficients
    coprime stops the integer blow-up of the naive pseudo-remainder.
    """
    kind = type(f)
    dg, lcg = _lead_in(g, v)
    if dg == 0:
        return kind.zero(f.nvars)
    r = f
    while r and _deg(r, v) >= dg:
        dr, lcr = _lead_in(r, v)
        shift = kind.var(f.nvars, v, dr - dg) if dr > dg else kind.one(f.nvars)
        r = _strip_content(r * lcg - g * lcr * shift)
    return r


# -- rational functions -------------------------------------------------------


class RatFunc:
    """Element of Q(T2,...,T{s+1}) in the unique normal form described above."""

    __slots__ = ("num", "den")

    POLY = Poly

    def __init__(self, num: Poly, den: Optional[Poly] = None):
        if not isinstance(num, Poly):
            raise StructuralError("numerator must be a Poly")
        if den is None:
            den = Poly.one(num.nvars)
        num._check(den)
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        if not num:
            self.num = self._wrap(Poly.zero(num.nvars))
            self.den = self._wrap(Poly.one(num.nvars))
            return
        g = _gcd(num, den)
        if not g.is_const():
            num = num.exact_div(g)
            den = den.exact_div(g)
        cn, cd = num.content(), den.content()
        num0 = num.scale(1 / cn)
        den0 = den.scale(1 / cd)
        if den0.leading()[1] < 0:
            den0, num0 = -den0, -num0
        ratio = cn / cd
        self.num = self._wrap(num0.scale(ratio.numerator))
        self.den = self._wrap(den0.scale(ratio.denominator))

    @classmethod
    def _wrap(cls, p: Poly) -> Poly:
        if type(p) is cls.POLY:
            return p
        return cls.POLY(p.nvars, p.terms)

    # -- constructors ----------------------------------------------------

    @classmethod
    def const(cls, nvars: int, value) -> "RatFunc":
        return cls(cls.POLY.const(nvars, value))

    @classmethod
    def zero(cls, nvars: int) -> "RatFunc":
        return cls(cls.POLY.zero(nvars))

    @classmethod
    def one(cls, nvars: int) -> "RatFunc":
        return cls(cls.POLY.one(nvars))

    @classmethod
    def var(cls, nvars: int, slot: int, power: int = 1) -> "RatFunc":
        return cls(cls.POLY.var(nvars, slot, power))

    # -- structure --------------------------------------------------------

    @property
    def nvars(self) -> int:
        return self.num.nvars

    def __bool__(self) -> bool:
        return bool(self.num)

    def is_const(self) -> bool:
        return self.num.is_const() and self.den.is_const()

    def const_value(self) -> Fraction:
        if not self.is_const():
            raise StructuralError("not a constant")
        return self.num.const_value() / self.den.const_value()

    def single_param_slot(self) -> Optional[int]:
        """Slot index when this is exactly one parameter to the first power."""
        if self.den.is_const() and self.den.const_value() == 1 and len(self.num.terms) == 1:
            (exp, c), = self.num.terms.items()
            if c == 1 and sum(exp) == 1:
                return exp.index(1)
        return None

    def param_slots(self) -> set:
        out = set()
        for p in (self.num, self.den):
            for exp in p.terms:
                out.update(i for i, k in enumerate(exp) if k)
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = type(self).const(self.nvars, other)
        return (isinstance(other, RatFunc)
                and self.num == other.num and self.den == other.den)

    def __hash__(self):
        return hash((self.num, self.den))

    # -- field operations ---------------------------------------------------

    def _coerce(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            return other
        return type(self).const(self.nvars, other)

    def __add__(self, other):
        o = self._coerce(other)
        return type(self)(self.num * o.den + o.num * self.den, self.den * o.den)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return type(self)(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        return type(self)(self.num * o.num, self.den * o.den)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        o = self._coerce(other)
        if not o:
            raise ZeroDivisionError("division by zero rational function")
        return type(self)(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return type(self).one(self.nvars) / self ** (-k)
        return type(self)(self.num ** k, self.den ** k)

    def inverse(self) -> "RatFunc":
        if not self:
            raise ZeroDivisionError("inverse of zero")
        return type(self)(self.den, self.num)

    # -- calculus / evaluation ------------------------------------------------

    def derivative(self, slot: int) -> "RatFunc":
        if not 0 <= slot < self.nvars:
            raise StructuralError(f"parameter slot {slot} out of range")
        n, d = self.num, self.den
        return type(self)(n.derivative(slot) * d - n * d.derivative(slot), d * d)

    def evaluate(self, point) -> Fraction:
        dv = self.den.evaluate(point)
        if dv == 0:
            raise PoleError(f"denominator vanishes at {tuple(point)}")
        return self.num.evaluate(point) / dv

    def subst_params(self, images: list) -> "RatFunc":
        """Substitute images[slot] (RatFunc-like of any arity) per parameter."""
        if len(images) != self.nvars:
            raise StructuralError("substitution list has wrong arity")
        if not images:
            raise StructuralError("cannot substitute into a 0-parameter function")
        proto = images[0]
        acc_num = _poly_subst_frac(self.num, images, proto)
        acc_den = _poly_subst_frac(self.den, images, proto)
        return acc_num / acc_den

    # -- rendering -----------------------------------------------------------

    def canonical(self) -> str:
        if self.den.is_const() and self.den.const_value() == 1:
            return self.num.render()
        return f"({self.num.render()})/({self.den.render()})"

    def __repr__(self):
        return f"<{type(self).__name__} {self.canonical()}>"


def _poly_subst_frac(p: Poly, images: list, proto: "RatFunc") -> "RatFunc":
    kind = type(proto)
    acc = kind.const(proto.nvars, 0)
    for exp, c in p.terms.items():
        term = kind.const(proto.nvars, c)
        for img, k in zip(images, exp):
            if k:
                term = term * img ** k
        acc = acc + term
    return acc


# -- spec-level operation names ------------------------------------------------


def poly_arith(a: Poly, b: Poly, kind: str) -> Poly:
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    raise StructuralError(f"unknown polynomial operation {kind!r}")


def ratfunc_arith(a: RatFunc, b: RatFunc, kind: str) -> RatFunc:
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        return a / b
    raise StructuralError(f"unknown rational operation {kind!r}")


def partial_derivative(f: RatFunc, i: int) -> RatFunc:
    """Formal partial with respect to the i-th parameter, 1 <= i <= s."""
    if not 1 <= i <= f.nvars:
        raise StructuralError(f"parameter index {i} out of range 1..{f.nvars}")
    return f.derivative(i - 1)


def evaluate(f: RatFunc, point) -> Fraction:
    return f.evaluate(point)


def canonical_string(f: RatFunc) -> str:
    return f.canonical()


# -- parsing ---------------------------------------------------------------
#
# Grammar (shared by RatFunc with T-variables and KElem with X-variables):
#
#   expr   := term (('+'|'-') term)*
#   term   := factor (('*'|'/') factor)*
#   factor := ('-'|'+') factor | atom ('^' exponent)?
#   atom   := INT | VAR | '(' expr ')'
#   exponent := INT | '(' INT '/' INT ')'
#
# Fractional exponents parse but must cancel to integers (they only appear in
# spec files before ramification; see the cli module).


def _tokenize(text: str, prefix: str):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(("int", int(text[i:j]), i))
            i = j
            continue
        if ch == prefix:
            j = i + 1
            while j < len(text) and text[j].isdigit():
                j += 1
            if j == i + 1:
                raise SpecParseError(f"variable {prefix!r} needs an index", column=i + 1)
            tokens.append(("var", int(text[i + 1:j]), i))
            i = j
            continue
        if ch in "+-*/^()":
            tokens.append((ch, ch, i))
            i += 1
            continue
        raise SpecParseError(f"unexpected character {ch!r}", column=i + 1)
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens, kind, nvars):
        self.tokens = tokens
        self.pos = 0
        self.kind = kind
        self.nvars = nvars

    def peek(self):
        return self.tokens[self.pos][0]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, msg):
        raise SpecParseError(f"{msg} near position {self.tokens[self.pos][2] + 1}")

    def parse(self):
        value = self.expr()
        if self.peek() != "end":
            self.fail("trailing input")
        return value

    def expr(self):
        value = self.term()
        while self.peek() in "+-":
            op = self.next()[0]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.factor()
        while self.peek() in "*/":
            op = self.next()[0]
            rhs = self.factor()
            if op == "*":
                value = value * rhs
            else:
                if not rhs:
                    self.fail("division by zero")
                value = value / rhs
        return value

    def factor(self):
        if self.peek() in "+-":
            op = self.next()[0]
            value = self.factor()
            return value if op == "+" else -value
        value = self.atom()
        if self.peek() == "^":
            self.next()
            k = self.exponent()
            if k.denominator != 1:
                raise SpecParseError(
                    f"fractional exponent {k} needs a ramify directive first")
            value = value ** int(k)
        return value

    def exponent(self) -> Fraction:
        tok, val, _ = self.next()
        if tok == "int":
            return Fraction(val)
        if tok == "(":
            a = self.next()
            if a[0] != "int":
                self.fail("expected integer in exponent")
            if self.next()[0] != "/":
                self.fail("expected / in fractional exponent")
            b = self.next()
            if b[0] != "int" or b[1] == 0:
                self.fail("expected nonzero integer in exponent")
            if self.next()[0] != ")":
                self.fail("expected ) closing exponent")
            return Fraction(a[1], b[1])
        self.fail("expected exponent")

    def atom(self):
        tok, val, _ = self.next()
        if tok == "int":
            return self.kind.const(self.nvars, val)
        if tok == "var":
            slot = val - self.kind.POLY.VAR_OFFSET
            if not 0 <= slot < self.nvars:
                raise SpecParseError(
                    f"variable {self.kind.POLY.VAR_PREFIX}{val} out of range for "
                    f"arity {self.nvars}")
            return self.kind.var(self.nvars, slot)
        if tok == "(":
            value = self.expr()
            if self.next()[0] != ")":
                self.fail("expected closing parenthesis")
            return value
        self.fail("expected a value")


def parse_ratfunc(text: str, nparams: int) -> RatFunc:
    """Parse the canonical T-variable grammar into a RatFunc."""
    tokens = _tokenize(text, RatFunc.POLY.VAR_PREFIX)
    return _Parser(tokens, RatFunc, nparams).parse()


def ramify_exponents(text: str, param_index: int, e: int, prefix: str = "T") -> str:
    """Rewrite T<param_index> |-> (fresh parameter)^e at the token level.

    Exponents on the target variable are multiplied by e (the fresh parameter
    keeps the display slot), so T4^(1/2) under e=4 becomes T4^2.  Other tokens
    pass through verbatim.
    """
    tokens = _tokenize(text, prefix)
    out = []
    i = 0
    while tokens[i][0] != "end":
        tok, val, _ = tokens[i]
        if tok == "var" and val == param_index:
            exp = Fraction(1)
            j = i + 1
            if tokens[j][0] == "^":
                parser = _Parser(tokens, RatFunc, 0)
                parser.pos = j + 1
                exp = parser.exponent()
                j = parser.pos
            new_exp = exp * e
            if new_exp.denominator != 1:
                raise SpecParseError(
                    f"ramification by {e} leaves fractional exponent {new_exp} "
                    f"on {prefix}{param_index}")
            out.append(f"{prefix}{val}^{int(new_exp)}" if new_exp != 1
                       else f"{prefix}{val}")
            i = j
            continue
        if tok == "int":
            out.append(str(val))
        elif tok == "var":
            out.append(f"{prefix}{val}")
        else:
            out.append(tok)
        i += 1
    return "".join(out)
