"""Elements of the fraction field of Q[[X1,...,Xn]] at desk scale.

Inputs to the valuation are fractions of X-polynomials (``KElem``); that is
the shape of everything the construction procedures manipulate.  Truncated
X-series only appear on the way out, as implicit-ideal generators.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Dict, Mapping, Optional

from .errors import StructuralError
from .ratfunc import Poly, RatFunc, XVarPoly, _Parser, _tokenize

XPoly = XVarPoly


class KElem(RatFunc):
    """Fraction of X-polynomials, same normal form as RatFunc."""

    __slots__ = ()
    POLY = XVarPoly


def kelem_arith(a: KElem, b: KElem, kind: str) -> KElem:
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        if not b:
            raise ZeroDivisionError("KElem division by zero")
        return a / b
    raise StructuralError(f"unknown K-element operation {kind!r}")


def parse_kelem(text: str, n: int) -> KElem:
    """Parse the X-variable grammar (mirror of the T-grammar)."""
    tokens = _tokenize(text, XVarPoly.VAR_PREFIX)
    return _Parser(tokens, KElem, n).parse()


def random_form(n: int, r: int, budget: int, rng: random.Random) -> XPoly:
    """Random homogeneous X-polynomial of total degree exactly r.

    Deterministic given the Random instance state; never returns zero.
    """
    if r < 0:
        raise StructuralError("degree must be non-negative")
    if budget < 1:
        raise StructuralError("term budget must be positive")
    terms: Dict[tuple, Fraction] = {}
    for _ in range(budget):
        exp = _random_composition(n, r, rng)
        c = rng.randint(-5, 5)
        if c == 0:
            c = 1
        terms[exp] = terms.get(exp, Fraction(0)) + c
    poly = XPoly(n, terms)
    if not poly:
        exp = _random_composition(n, r, rng)
        poly = XPoly(n, {exp: Fraction(1)})
    return poly


def _random_composition(n: int, r: int, rng: random.Random) -> tuple:
    """Exponent vector of length n summing to exactly r."""
    cuts = sorted(rng.randint(0, r) for _ in range(n - 1)) if n > 1 else []
    bounds = [0] + cuts + [r]
    return tuple(bounds[i + 1] - bounds[i] for i in range(n))


class TruncatedXSeries:
    """Output-only multivariate series with rational coefficients.

    Stored terms all have total degree below ``total_degree_prec``; used to
    print implicit-ideal generators, nothing else.
    """

    __slots__ = ("n", "terms", "total_degree_prec")

    def __init__(self, n: int, terms: Optional[Mapping[tuple, object]] = None,
                 total_degree_prec: int = 32):
        if total_degree_prec < 1:
            raise StructuralError("total degree precision must be positive")
        self.n = n
        self.total_degree_prec = total_degree_prec
        clean: Dict[tuple, Fraction] = {}
        if terms:
            for exp, c in terms.items():
                if len(exp) != n:
                    raise StructuralError("exponent arity mismatch")
                if sum(exp) >= total_degree_prec:
                    raise StructuralError(
                        f"term of degree {sum(exp)} at precision {total_degree_prec}")
                frac = Fraction(c)
                if frac:
                    clean[tuple(exp)] = frac
        self.terms = clean

    def as_poly(self) -> XPoly:
        return XPoly(self.n, self.terms)

    def render(self) -> str:
        body = self.as_poly().render()
        return f"{body}+O(deg {self.total_degree_prec})"

    def __eq__(self, other):
        return (isinstance(other, TruncatedXSeries) and self.n == other.n
                and self.terms == other.terms
                and self.total_degree_prec == other.total_degree_prec)

    def __repr__(self):
        return f"<TruncatedXSeries {self.render()}>"
