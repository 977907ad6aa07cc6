"""Independent cross-checks used by the test suite.

The transcendence oracle goes through sympy Groebner elimination: compute the
ideal of algebraic relations among the given functions, then read the Krull
dimension (= transcendence degree of the generated field) off the leading
monomials via the maximal-independent-set criterion.  None of the engine's
Jacobian machinery is involved.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import sympy

from discval.ratfunc import RatFunc, parse_ratfunc


def _sympy_poly(poly, syms):
    expr = sympy.Integer(0)
    for exp, c in poly.terms.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for s, k in zip(syms, exp):
            if k:
                term *= s ** k
        expr += term
    return expr


def oracle_trdeg(funcs, s: int) -> int:
    """Transcendence degree of Q(funcs) over Q, by elimination."""
    if not funcs:
        return 0
    ts = sympy.symbols(f"e1:{s + 1}")
    ys = sympy.symbols(f"y1:{len(funcs) + 1}")
    aux = sympy.Symbol("w0")
    polys = []
    dens = []
    for f, y in zip(funcs, ys):
        num = _sympy_poly(f.num, ts)
        den = _sympy_poly(f.den, ts)
        polys.append(sympy.expand(den * y - num))
        if den != 1:
            dens.append(den)
    eliminate = list(ts)
    if dens:
        polys.append(sympy.expand(aux * sympy.prod(dens) - 1))
        eliminate.append(aux)
    basis = sympy.groebner(polys, *(eliminate + list(ys)), order="lex")
    yset = set(ys)
    relations = [g for g in basis.exprs if g.free_symbols <= yset]
    if not relations:
        return len(funcs)
    basis2 = sympy.groebner(relations, *ys, order="grevlex")
    supports = []
    for g in basis2.exprs:
        monom = sympy.Poly(g, *ys).monoms(order="grevlex")[0]
        supports.append(frozenset(i for i, k in enumerate(monom) if k))
    return _max_independent(supports, len(ys))


def _max_independent(supports, nvars: int) -> int:
    best = 0
    for size in range(nvars, -1, -1):
        for combo in itertools.combinations(range(nvars), size):
            chosen = set(combo)
            if not any(supp <= chosen for supp in supports):
                return size
    return best


class EliminationOracle:
    """is_algebraic_over via elimination, with memoized base degrees."""

    def __init__(self, s: int):
        self.s = s
        self._memo = {}

    def _trdeg(self, funcs):
        key = tuple(sorted(f.canonical() for f in funcs))
        if key not in self._memo:
            self._memo[key] = oracle_trdeg(list(funcs), self.s)
        return self._memo[key]

    def is_algebraic(self, gens, r) -> bool:
        return self._trdeg(tuple(gens) + (r,)) == self._trdeg(tuple(gens))


def oracle_is_algebraic(gens, r, s: int) -> bool:
    return EliminationOracle(s).is_algebraic(gens, r)
