"""Truncated power series in t with rational-function coefficients.

A ``TSeries`` knows its coefficients for degrees strictly below ``prec``;
everything at or beyond ``prec`` is unknown.  ``order`` therefore answers
either ``Exact(m)`` (a nonzero coefficient was seen at degree m) or
``AtLeast(prec)`` (every known coefficient vanished).  The engine never says
"zero": a vanished series may still be a kernel element of the embedding.

Precision bookkeeping follows one rule everywhere: a result's precision is
the largest bound the inputs actually justify, so every coefficient stored is
exact and every Exact order is final.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional

from .errors import IndeterminateError, NotAUnitError, StructuralError
from .ratfunc import RatFunc

PREC_HARD_CAP = 1024  # keeps power towers from hoarding useless terms


@dataclass(frozen=True)
class Value:
    """Order of a series: certified exact, or only bounded from below."""

    kind: str  # "exact" | "at_least"
    amount: int
    kernel_suspect: bool = field(default=False, compare=False)

    @classmethod
    def exact(cls, amount: int) -> "Value":
        return cls("exact", amount)

    @classmethod
    def at_least(cls, amount: int, kernel_suspect: bool = False) -> "Value":
        return cls("at_least", amount, kernel_suspect)

    @property
    def is_exact(self) -> bool:
        return self.kind == "exact"

    def __str__(self) -> str:
        label = "Exact" if self.is_exact else "AtLeast"
        suffix = " (kernel-suspect)" if self.kernel_suspect else ""
        return f"{label} {self.amount}{suffix}"


class TSeries:
    __slots__ = ("coeffs", "prec", "nparams")

    def __init__(self, nparams: int, coeffs: Optional[Mapping[int, RatFunc]] = None,
                 prec: int = 32):
        if prec < 1:
            raise StructuralError("precision must be positive")
        self.nparams = nparams
        self.prec = min(prec, PREC_HARD_CAP)
        clean: Dict[int, RatFunc] = {}
        if coeffs:
            for deg, c in coeffs.items():
                if deg < 0:
                    raise StructuralError("negative degree in series")
                if deg < self.prec and c:
                    if c.nvars != nparams:
                        raise StructuralError("coefficient arity mismatch")
                    clean[deg] = c
        self.coeffs = clean

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, nparams: int, prec: int) -> "TSeries":
        return cls(nparams, {}, prec)

    @classmethod
    def const(cls, nparams: int, value, prec: int) -> "TSeries":
        c = value if isinstance(value, RatFunc) else RatFunc.const(nparams, value)
        return cls(nparams, {0: c}, prec)

    @classmethod
    def t_power(cls, nparams: int, d: int, prec: int) -> "TSeries":
        return cls(nparams, {d: RatFunc.one(nparams)}, prec)

    # -- inspection -------------------------------------------------------

    def order(self) -> Value:
        if not self.coeffs:
            return Value.at_least(self.prec)
        return Value.exact(min(self.coeffs))

    def ord_bound(self) -> int:
        """Known lower bound on the order (prec when nothing is visible)."""
        return min(self.coeffs) if self.coeffs else self.prec

    def leading_coeff(self) -> RatFunc:
        v = self.order()
        if not v.is_exact:
            raise IndeterminateError(
                f"order only known to be >= {v.amount}; no leading coefficient")
        return self.coeffs[v.amount]

    def coeff(self, d: int) -> RatFunc:
        if d >= self.prec:
            raise IndeterminateError(f"degree {d} beyond precision {self.prec}")
        return self.coeffs.get(d, RatFunc.zero(self.nparams))

    def __eq__(self, other) -> bool:
        return (isinstance(other, TSeries) and self.nparams == other.nparams
                and self.prec == other.prec and self.coeffs == other.coeffs)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other: "TSeries") -> None:
        if self.nparams != other.nparams:
            raise StructuralError("parameter arity mismatch between series")

    def __add__(self, other: "TSeries") -> "TSeries":
        self._check(other)
        prec = min(self.prec, other.prec)
        out = {d: c for d, c in self.coeffs.items() if d < prec}
        for d, c in other.coeffs.items():
            if d >= prec:
                continue
            s = out.get(d)
            s = c if s is None else s + c
            if s:
                out[d] = s
            else:
                out.pop(d, None)
        return TSeries(self.nparams, out, prec)

    def __neg__(self) -> "TSeries":
        return TSeries(self.nparams, {d: -c for d, c in self.coeffs.items()}, self.prec)

    def __sub__(self, other: "TSeries") -> "TSeries":
        return self + (-other)

    def __mul__(self, other: "TSeries") -> "TSeries":
        self._check(other)
        prec = min(self.prec + other.ord_bound(), other.prec + self.ord_bound(),
                   PREC_HARD_CAP)
        out: Dict[int, RatFunc] = {}
        for da, ca in self.coeffs.items():
            for db, cb in other.coeffs.items():
                d = da + db
                if d >= prec:
                    continue
                s = out.get(d)
                p = ca * cb
                s = p if s is None else s + p
                if s:
                    out[d] = s
                else:
                    out.pop(d, None)
        return TSeries(self.nparams, out, prec)

    def scale(self, c: RatFunc) -> "TSeries":
        if not c:
            return TSeries.zero(self.nparams, self.prec)
        return TSeries(self.nparams, {d: v * c for d, v in self.coeffs.items()},
                       self.prec)

    def __pow__(self, k: int) -> "TSeries":
        if k < 0:
            raise StructuralError("negative series power")
        if k == 0:
            return TSeries.const(self.nparams, 1, PREC_HARD_CAP)
        result = self
        for _ in range(k - 1):
            result = result * self
        return result

    def shift(self, d: int) -> "TSeries":
        """Multiply by t^d; d may be negative down to -ord_bound."""
        if d == 0:
            return self
        if d < 0 and self.ord_bound() < -d:
            raise StructuralError(
                f"shift by {d} would create negative degrees (order "
                f"{self.ord_bound()})")
        prec = min(self.prec + d, PREC_HARD_CAP)
        return TSeries(self.nparams, {deg + d: c for deg, c in self.coeffs.items()},
                       prec)

    def invert_unit(self) -> "TSeries":
        """Inverse of a unit (order exactly 0), to the same precision."""
        v = self.order()
        if not (v.is_exact and v.amount == 0):
            raise NotAUnitError(f"cannot invert series of order {v}")
        a0 = self.coeffs[0]
        inv0 = a0.inverse()
        out: Dict[int, RatFunc] = {0: inv0}
        for d in range(1, self.prec):
            acc = None
            for j, aj in self.coeffs.items():
                if 0 < j <= d:
                    b = out.get(d - j)
                    if b is not None:
                        term = aj * b
                        acc = term if acc is None else acc + term
            if acc is not None:
                c = -(inv0 * acc)
                if c:
                    out[d] = c
        return TSeries(self.nparams, out, self.prec)

    def truncate(self, prec: int) -> "TSeries":
        if prec > self.prec:
            raise StructuralError("cannot truncate upward")
        return TSeries(self.nparams, self.coeffs, prec)

    def with_prec(self, prec: int) -> "TSeries":
        """Re-tag precision; only valid when higher coefficients are known zero."""
        return TSeries(self.nparams, self.coeffs, prec)

    # -- rendering ------------------------------------------------------------

    def render(self) -> str:
        parts = []
        for d in sorted(self.coeffs):
            c = self.coeffs[d].canonical()
            if d == 0:
                parts.append(f"({c})")
            elif d == 1:
                parts.append(f"({c})*t")
            else:
                parts.append(f"({c})*t^{d}")
        parts.append(f"O(t^{self.prec})")
        return "+".join(parts)

    def __repr__(self):
        return f"<TSeries {self.render()}>"


def ts_arith(a: TSeries, b: TSeries, kind: str) -> TSeries:
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    raise StructuralError(f"unknown series operation {kind!r}")


def ord_of(a: TSeries) -> Value:
    return a.order()
