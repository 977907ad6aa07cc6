"""Pushforwards of the two basic transformations, with a replayable log.

A monoidal step divides one variable's image by another's; a coordinate
change subtracts constant-coefficient multiples of powers of the first
variable; permutations relabel.  Every step also knows how to pull a
K-element over the new variables back to the old ones, which is how
residue-field generators get their K-representatives.

Coordinate-change coefficients live in the parameter field; an optional
K-representative may ride along (it is never the source of truth for replay,
only for pullback).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

from .errors import (ContractError, KernelSuspicionError,
                     RepresentativeMissingError, SpecParseError,
                     StructuralError)
from .kfield import KElem
from .ratfunc import RatFunc, parse_ratfunc
from .valuation import ValuationSpec


@dataclass(frozen=True)
class Monoidal:
    divisor: int
    target: int

    def __post_init__(self):
        if self.divisor == self.target:
            raise StructuralError("monoidal step needs two distinct variables")

    def serialize(self) -> str:
        return f"M {self.divisor} {self.target}"


@dataclass(frozen=True)
class CoordChange:
    target: int
    terms: Tuple[Tuple[RatFunc, int], ...]
    reprs: Tuple[Optional[KElem], ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.target == 1:
            raise StructuralError("coordinate changes never touch the first variable")
        last = 0
        for c, m in self.terms:
            if not c:
                raise StructuralError("coordinate-change coefficients must be nonzero")
            if m <= last:
                raise StructuralError("exponents must be strictly increasing")
            last = m
        if self.reprs and len(self.reprs) != len(self.terms):
            raise StructuralError("one representative slot per term")

    def serialize(self) -> str:
        pairs = ";".join(f"({c.canonical()},{m})" for c, m in self.terms)
        return f"C {self.target} {pairs}" if self.terms else f"C {self.target} -"


@dataclass(frozen=True)
class Permute:
    perm: Tuple[int, ...]  # entry k (0-based) holds the old index at new slot k+1

    def __post_init__(self):
        if sorted(self.perm) != list(range(1, len(self.perm) + 1)):
            raise StructuralError(f"{self.perm} is not a permutation of 1..n")

    def serialize(self) -> str:
        return "P " + " ".join(str(p) for p in self.perm)


TransformStep = Union[Monoidal, CoordChange, Permute]


def apply_monoidal(spec: ValuationSpec, i: int, j: int) -> ValuationSpec:
    """Divide variable j's image by variable i's; v(X_j) >= v(X_i) required."""
    step = Monoidal(i, j)
    vi = spec.entry(i).order()
    vj = spec.entry(j).order()
    if not vi.is_exact:
        raise KernelSuspicionError(
            f"divisor X{i} has uncertified order {vi}; cannot certify the step")
    if not vj.is_exact:
        raise KernelSuspicionError(
            f"target X{j} has uncertified order {vj}; cannot certify the step")
    if vj.amount < vi.amount:
        raise ContractError(
            f"monoidal step needs v(X{j}) >= v(X{i}), got {vj.amount} < {vi.amount}")
    unit = spec.entry(i).shift(-vi.amount).invert_unit()
    new_entry = (spec.entry(j) * unit).shift(-vi.amount)
    return spec.with_entry(step.target, new_entry)


def apply_coord_change(spec: ValuationSpec, i: int,
                       terms: Sequence[Tuple[RatFunc, int]],
                       reprs: Sequence[Optional[KElem]] = ()) -> ValuationSpec:
    """Subtract sum of c * (first image)^m from variable i's image."""
    step = CoordChange(i, tuple(terms), tuple(reprs))
    base = spec.entry(1)
    acc = spec.entry(i)
    for c, m in step.terms:
        acc = acc - (base ** m).scale(c)
    out = spec.with_entry(i, acc)
    if not acc.order().is_exact:
        raise KernelSuspicionError(
            f"X{i} minus its initial parts vanishes below t^{acc.prec}; the "
            f"subtraction series may converge to zero", spec_after=out)
    return out


def apply_permutation(spec: ValuationSpec, perm: Sequence[int]) -> ValuationSpec:
    step = Permute(tuple(perm))
    if len(step.perm) != spec.n:
        raise StructuralError("permutation arity mismatch")
    psi = tuple(spec.entry(p) for p in step.perm)
    return ValuationSpec(n=spec.n, s=spec.s, psi=psi, prec=spec.prec,
                         name=spec.name, prec_cap=spec.prec_cap, source=None)


def apply_step(spec: ValuationSpec, step: TransformStep) -> ValuationSpec:
    if isinstance(step, Monoidal):
        return apply_monoidal(spec, step.divisor, step.target)
    if isinstance(step, CoordChange):
        return apply_coord_change(spec, step.target, step.terms, step.reprs)
    if isinstance(step, Permute):
        return apply_permutation(spec, step.perm)
    raise StructuralError(f"unknown transform step {step!r}")


def pullback(step: TransformStep, f: KElem) -> KElem:
    """Rewrite an element over the new variables in the old variables."""
    n = f.nvars
    identity = [KElem.var(n, k) for k in range(n)]
    if isinstance(step, Monoidal):
        images = identity
        images[step.target - 1] = (KElem.var(n, step.target - 1)
                                   / KElem.var(n, step.divisor - 1))
        return f.subst_params(images)
    if isinstance(step, CoordChange):
        acc = KElem.var(n, step.target - 1)
        x1 = KElem.var(n, 0)
        reprs = step.reprs or (None,) * len(step.terms)
        for (c, m), rep in zip(step.terms, reprs):
            if c.is_const():
                rep_elem = KElem.const(n, c.const_value())
            elif rep is not None:
                rep_elem = rep
            else:
                raise RepresentativeMissingError(
                    f"coefficient {c.canonical()} carries no K-representative")
            acc = acc - rep_elem * x1 ** m
        images = identity
        images[step.target - 1] = acc
        return f.subst_params(images)
    if isinstance(step, Permute):
        images = [KElem.var(n, p - 1) for p in step.perm]
        return f.subst_params(images)
    raise StructuralError(f"unknown transform step {step!r}")


@dataclass(frozen=True)
class LogEntry:
    step: TransformStep
    before: Tuple[str, ...] = ()
    after: Tuple[str, ...] = ()


class TransformLog:
    """Ordered, replayable record of applied steps."""

    def __init__(self, entries: Sequence[LogEntry] = ()):
        self.entries = list(entries)

    @property
    def steps(self):
        return [e.step for e in self.entries]

    def __len__(self):
        return len(self.entries)

    def record(self, step: TransformStep, before: ValuationSpec,
               after: ValuationSpec) -> None:
        self.entries.append(LogEntry(
            step,
            tuple(str(before.entry(i).order()) for i in range(1, before.n + 1)),
            tuple(str(after.entry(i).order()) for i in range(1, after.n + 1))))

    def extend(self, other: "TransformLog") -> None:
        self.entries.extend(other.entries)

    def apply(self, spec: ValuationSpec) -> ValuationSpec:
        for step in self.steps:
            spec = apply_step(spec, step)
        return spec

    def pullback(self, f: KElem) -> KElem:
        for step in reversed(self.steps):
            f = pullback(step, f)
        return f

    def serialize(self) -> str:
        return "\n".join(step.serialize() for step in self.steps)

    def __repr__(self):
        return f"<TransformLog {len(self.entries)} steps>"


def parse_log(text: str, nparams: int) -> TransformLog:
    """Parse the line-oriented log format back into steps."""
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if parts[0] == "M" and len(parts) == 3:
                step = Monoidal(int(parts[1]), int(parts[2]))
            elif parts[0] == "P":
                step = Permute(tuple(int(p) for p in parts[1:]))
            elif parts[0] == "C" and len(parts) == 3:
                step = CoordChange(int(parts[1]), _parse_pairs(parts[2], nparams))
            else:
                raise SpecParseError("unrecognized step", line=lineno)
        except (ValueError, StructuralError) as exc:
            raise SpecParseError(f"bad transform step: {exc}", line=lineno)
        entries.append(LogEntry(step))
    return TransformLog(entries)


def _parse_pairs(text: str, nparams: int) -> Tuple[Tuple[RatFunc, int], ...]:
    if text == "-":
        return ()
    pairs = []
    for chunk in text.split(";"):
        if not (chunk.startswith("(") and chunk.endswith(")")):
            raise SpecParseError(f"malformed coefficient pair {chunk!r}")
        body = chunk[1:-1]
        coeff_text, _, m_text = body.rpartition(",")
        pairs.append((parse_ratfunc(coeff_text, nparams), int(m_text)))
    return tuple(pairs)
