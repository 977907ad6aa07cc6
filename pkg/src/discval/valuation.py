"""The parametric valuation: evaluate the embedding on K-elements.

A ``ValuationSpec`` holds the n series images of the variables.  Values are
computed as orders of pushed-forward series, with automatic precision
escalation (doubling up to ``prec_cap``) when the spec was built from a
generator source able to emit more terms.  When escalation is exhausted the
engine answers ``AtLeast`` with a kernel-suspicion flag rather than guessing.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Tuple

from .errors import (ContractError, IndeterminateError, KernelSuspicionError,
                     PrecisionCeilingError, StructuralError)
from .kfield import KElem, XPoly
from .ratfunc import RatFunc
from .tseries import TSeries, Value

logger = logging.getLogger("discval")

DEFAULT_PREC = 32
DEFAULT_PREC_CAP = 512


@dataclass(frozen=True)
class ValuationSpec:
    """Immutable description of v = (order in t) o Psi."""

    n: int
    s: int
    psi: Tuple[TSeries, ...]
    prec: int
    name: str = ""
    prec_cap: int = DEFAULT_PREC_CAP
    source: Optional[object] = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.psi) != self.n:
            raise StructuralError(f"expected {self.n} series, got {len(self.psi)}")
        for i, ts in enumerate(self.psi, start=1):
            if ts.nparams != self.s:
                raise StructuralError(f"psi({i}) has wrong parameter arity")

    def entry(self, i: int) -> TSeries:
        """Image of the i-th variable, 1-based."""
        if not 1 <= i <= self.n:
            raise StructuralError(f"variable index {i} out of range 1..{self.n}")
        return self.psi[i - 1]

    def with_entry(self, i: int, ts: TSeries) -> "ValuationSpec":
        psi = list(self.psi)
        psi[i - 1] = ts
        return replace(self, psi=tuple(psi), source=None)

    def check_center(self) -> None:
        """Every variable must land in the maximal ideal with certainty."""
        for i in range(1, self.n + 1):
            v = self.entry(i).order()
            if not v.is_exact or v.amount < 1:
                raise ContractError(
                    f"psi(X{i}) has order {v}; the center condition needs a "
                    f"certified order >= 1")

    def canonical(self) -> str:
        lines = [f"n {self.n}", f"params {self.s}", f"prec {self.prec}"]
        for i in range(1, self.n + 1):
            lines.append(f"psi {i} {self.entry(i).render()}")
        return "\n".join(lines)


@dataclass(frozen=True)
class ResidueDatum:
    value: Value
    residue: Optional[RatFunc] = None


def substitute_poly(spec: ValuationSpec, p: XPoly) -> TSeries:
    """Push an X-polynomial through the embedding."""
    if p.nvars != spec.n:
        raise StructuralError(f"polynomial arity {p.nvars}, spec arity {spec.n}")
    if not p:
        raise StructuralError("cannot push forward the zero polynomial")
    max_exp = [0] * spec.n
    for exp in p.terms:
        for i, k in enumerate(exp):
            if k > max_exp[i]:
                max_exp[i] = k
    powers = []
    for i in range(spec.n):
        row = [None] * (max_exp[i] + 1)
        if max_exp[i] >= 1:
            row[1] = spec.entry(i + 1)
            for k in range(2, max_exp[i] + 1):
                row[k] = row[k - 1] * row[1]
        powers.append(row)
    acc = None
    for exp, c in p.terms.items():
        term = None
        for i, k in enumerate(exp):
            if k:
                term = powers[i][k] if term is None else term * powers[i][k]
        if term is None:
            term = TSeries.const(spec.s, c, spec.prec)
        else:
            term = term.scale(RatFunc.const(spec.s, c))
        acc = term if acc is None else acc + term
    return acc


def eval_psi(spec: ValuationSpec, f: KElem) -> TSeries:
    """Image of f with the denominator's t-power divided out.

    Needs v(f) >= 0; use :func:`value` for general elements.
    """
    if not f:
        raise ContractError("eval_psi needs a syntactically nonzero element")
    num_ts = substitute_poly(spec, f.num)
    den_ts = substitute_poly(spec, f.den)
    dord = den_ts.order()
    if not dord.is_exact:
        raise KernelSuspicionError(
            f"denominator image vanishes below t^{dord.amount}; cannot divide")
    unit = den_ts.shift(-dord.amount)
    result = num_ts * unit.invert_unit()
    nord = result.ord_bound()
    if nord < dord.amount:
        raise ContractError(
            f"element has negative value {nord - dord.amount}; eval_psi only "
            f"covers the valuation ring")
    return result.shift(-dord.amount)


def _escalated_order(spec: ValuationSpec, p: XPoly) -> Tuple[Value, ValuationSpec]:
    working = spec
    while True:
        v = substitute_poly(working, p).order()
        if v.is_exact:
            return v, working
        if working.prec >= working.prec_cap:
            return v, working
        try:
            working = raise_precision(
                working, min(working.prec * 2, working.prec_cap))
        except PrecisionCeilingError:
            return v, working
        logger.info("precision escalated to %d for %s", working.prec,
                    working.name or "anonymous spec")


def value(spec: ValuationSpec, f: KElem) -> Value:
    """v(f) = v(num) - v(den), escalating precision while the answer is open."""
    if not f:
        raise ContractError("value needs a syntactically nonzero element")
    vden, spec2 = _escalated_order(spec, f.den)
    if not vden.is_exact:
        raise KernelSuspicionError(
            f"denominator indistinguishable from 0 at precision {vden.amount}")
    vnum, _ = _escalated_order(spec2, f.num)
    if not vnum.is_exact:
        return Value.at_least(vnum.amount - vden.amount, kernel_suspect=True)
    return Value.exact(vnum.amount - vden.amount)


def residue(spec: ValuationSpec, f: KElem) -> RatFunc:
    """Residue class of a value-zero element, as an element of Delta."""
    v = value(spec, f)
    if not v.is_exact:
        raise IndeterminateError(f"value of the element is only {v}")
    if v.amount != 0:
        raise ContractError(f"residue needs value Exact 0, got {v}")
    return eval_psi(spec, f).leading_coeff()


def initial_datum(spec: ValuationSpec, f: KElem) -> ResidueDatum:
    """Value plus the coefficient of the initial form, when certified."""
    if not f:
        raise ContractError("initial_datum needs a nonzero element")
    vden, spec2 = _escalated_order(spec, f.den)
    if not vden.is_exact:
        raise KernelSuspicionError("denominator indistinguishable from 0")
    vnum, spec3 = _escalated_order(spec2, f.num)
    if not vnum.is_exact:
        return ResidueDatum(Value.at_least(vnum.amount - vden.amount,
                                           kernel_suspect=True))
    lc_num = substitute_poly(spec3, f.num).leading_coeff()
    lc_den = substitute_poly(spec3, f.den).leading_coeff()
    return ResidueDatum(Value.exact(vnum.amount - vden.amount), lc_num / lc_den)


def raise_precision(spec: ValuationSpec, new_prec: int) -> ValuationSpec:
    """Same valuation with more terms; needs a generator-backed source."""
    if new_prec <= spec.prec:
        raise ContractError(
            f"new precision {new_prec} must exceed current {spec.prec}")
    if spec.source is None:
        raise PrecisionCeilingError(
            "spec has no generator source; cannot emit more terms")
    psi = tuple(spec.source.emit(i, new_prec) for i in range(1, spec.n + 1))
    return replace(spec, psi=psi, prec=new_prec)


def make_spec(entries: Sequence[TSeries], prec: int, name: str = "",
              prec_cap: int = DEFAULT_PREC_CAP, s: Optional[int] = None,
              source=None, enforce_center: bool = True) -> ValuationSpec:
    """Convenience constructor used by tests and the parser."""
    if not entries:
        raise StructuralError("a valuation needs at least one variable")
    nparams = s if s is not None else entries[0].nparams
    spec = ValuationSpec(n=len(entries), s=nparams, psi=tuple(entries),
                         prec=prec, name=name, prec_cap=prec_cap, source=source)
    if enforce_center:
        spec.check_center()
    return spec
