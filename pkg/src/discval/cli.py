"""File-driven front end.

Spec files are line oriented::

    name ex41          # optional label
    n 2                # number of series variables
    params 1           # number of parameters (printed T2..T{s+1})
    prec 24            # working precision in t
    preccap 512        # optional escalation ceiling
    psi 1 poly 1:1     # X1 |-> t           (degree:coefficient pairs)
    psi 2 poly 1:1 3:1
    psi 2 geom c=1 g=T2 shift=3   # adds t^shift * sum_j c^j (g t)^j

Several ``psi`` lines for the same variable add up.  ``poly`` coefficients
use the T-variable grammar and may carry fractional exponents like
``T4^(1/2)``; those parse only after a ramify directive (``--ramify
T4=S^4``) scales them to integers.  The substituted parameter keeps its slot
and display name.

Exit codes: 0 ok, 2 contract violation, 3 inconclusive (caps reached),
4 parse error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from . import algorithms
from .errors import (ContractError, EngineError, InconclusiveError,
                     KernelSuspicionError, PrecisionCeilingError,
                     SpecParseError)
from .kfield import parse_kelem
from .ratfunc import RatFunc, parse_ratfunc, ramify_exponents
from .transforms import TransformLog, parse_log
from .tseries import TSeries
from .valuation import (DEFAULT_PREC_CAP, ValuationSpec, residue, value)


@dataclass(frozen=True)
class RamifyDirective:
    param_index: int  # printed index, e.g. 4 for T4
    e: int

    def __post_init__(self):
        if self.e < 1:
            raise SpecParseError("ramification exponent must be >= 1")


@dataclass(frozen=True)
class PolyComponent:
    terms: Tuple[Tuple[int, str], ...]  # (degree, coefficient text)


@dataclass(frozen=True)
class GeomComponent:
    c: Fraction
    g: str
    shift: int


@dataclass(frozen=True)
class SpecSource:
    """Parsed, ramifiable description able to emit entries at any precision."""

    name: str
    n: int
    s: int
    prec: int
    prec_cap: int
    entries: Tuple[Tuple[object, ...], ...]  # per variable, components

    def emit(self, i: int, prec: int) -> TSeries:
        acc = TSeries.zero(self.s, prec)
        for comp in self.entries[i - 1]:
            if isinstance(comp, PolyComponent):
                coeffs = {}
                for deg, text in comp.terms:
                    c = parse_ratfunc(text, self.s)
                    if deg in coeffs:
                        c = coeffs[deg] + c
                    coeffs[deg] = c
                acc = acc + TSeries(self.s, coeffs, prec)
            elif isinstance(comp, GeomComponent):
                g = parse_ratfunc(comp.g, self.s)
                coeffs = {}
                j = 1
                while comp.shift + j < prec:
                    coeff = g ** j * RatFunc.const(self.s, comp.c ** j)
                    if coeff:
                        coeffs[comp.shift + j] = coeff
                    j += 1
                acc = acc + TSeries(self.s, coeffs, prec)
            else:
                raise SpecParseError(f"unknown component {comp!r}")
        return acc

    def build(self) -> ValuationSpec:
        psi = tuple(self.emit(i, self.prec) for i in range(1, self.n + 1))
        spec = ValuationSpec(n=self.n, s=self.s, psi=psi, prec=self.prec,
                             name=self.name, prec_cap=self.prec_cap, source=self)
        for i in range(1, self.n + 1):
            v = spec.entry(i).order()
            if not v.is_exact or v.amount < 1:
                raise ContractError(
                    f"psi(X{i}) has order {v}: the center must be the maximal "
                    f"ideal, so every variable needs value >= 1")
        return spec

    def serialize(self) -> str:
        lines = [f"name {self.name}" if self.name else "name spec",
                 f"n {self.n}", f"params {self.s}", f"prec {self.prec}",
                 f"preccap {self.prec_cap}"]
        for i, comps in enumerate(self.entries, start=1):
            for comp in comps:
                if isinstance(comp, PolyComponent):
                    pairs = " ".join(f"{d}:{t}" for d, t in comp.terms)
                    lines.append(f"psi {i} poly {pairs}")
                else:
                    lines.append(
                        f"psi {i} geom c={comp.c} g={comp.g} shift={comp.shift}")
        return "\n".join(lines) + "\n"


def ramify(source: SpecSource, directive: RamifyDirective) -> SpecSource:
    """Rewrite T<i> |-> (fresh parameter)^e in every coefficient string."""
    target = directive.param_index
    if not 2 <= target <= source.s + 1:
        sys.stderr.write(
            f"warning: ramify target T{target} is not a parameter of this "
            f"spec; directive ignored\n")
        return source
    new_entries = []
    for comps in source.entries:
        out = []
        for comp in comps:
            if isinstance(comp, PolyComponent):
                out.append(PolyComponent(tuple(
                    (d, ramify_exponents(t, target, directive.e))
                    for d, t in comp.terms)))
            else:
                out.append(replace(
                    comp, g=ramify_exponents(comp.g, target, directive.e)))
        new_entries.append(tuple(out))
    return replace(source, entries=tuple(new_entries))


# -- file parsing -------------------------------------------------------------


def parse_source(text: str, name_hint: str = "") -> SpecSource:
    header: Dict[str, int] = {}
    name = name_hint
    entries: Dict[int, List[object]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0]
        try:
            if key == "name" and len(parts) == 2:
                name = parts[1]
            elif key in ("n", "params", "prec", "preccap") and len(parts) == 2:
                header[key] = int(parts[1])
            elif key == "psi":
                _parse_psi_line(parts, entries, lineno)
            else:
                raise SpecParseError(f"unrecognized directive {key!r}",
                                     line=lineno)
        except ValueError as exc:
            raise SpecParseError(str(exc), line=lineno)
    for required in ("n", "params", "prec"):
        if required not in header:
            raise SpecParseError(f"missing {required!r} declaration")
    n = header["n"]
    if n < 1:
        raise SpecParseError("need at least one variable")
    for i in range(1, n + 1):
        if i not in entries:
            raise SpecParseError(f"no psi entry for X{i}")
    for i in entries:
        if not 1 <= i <= n:
            raise SpecParseError(f"psi index {i} out of range 1..{n}")
    return SpecSource(
        name=name, n=n, s=header["params"], prec=header["prec"],
        prec_cap=header.get("preccap", DEFAULT_PREC_CAP),
        entries=tuple(tuple(entries[i]) for i in range(1, n + 1)))


def _parse_psi_line(parts, entries, lineno):
    if len(parts) < 3:
        raise SpecParseError("psi line needs: psi <i> poly|geom ...", line=lineno)
    i = int(parts[1])
    kind = parts[2]
    if kind == "poly":
        pairs = []
        for chunk in parts[3:]:
            deg_text, sep, coeff_text = chunk.partition(":")
            if not sep or not coeff_text:
                raise SpecParseError(
                    f"expected degree:coefficient, got {chunk!r}", line=lineno)
            deg = int(deg_text)
            if deg < 0:
                raise SpecParseError("series degrees are non-negative",
                                     line=lineno)
            pairs.append((deg, coeff_text))
        if not pairs:
            raise SpecParseError("poly component needs at least one term",
                                 line=lineno)
        entries.setdefault(i, []).append(PolyComponent(tuple(pairs)))
    elif kind == "geom":
        fields = {}
        for chunk in parts[3:]:
            key, sep, val = chunk.partition("=")
            if not sep or key not in ("c", "g", "shift"):
                raise SpecParseError(f"bad geom field {chunk!r}", line=lineno)
            fields[key] = val
        if "g" not in fields:
            raise SpecParseError("geom component needs g=<ratfunc>", line=lineno)
        c = Fraction(fields.get("c", "1"))
        if c == 0:
            raise SpecParseError("geom ratio c must be nonzero", line=lineno)
        shift = int(fields.get("shift", "0"))
        if shift < 0:
            raise SpecParseError("geom shift must be >= 0", line=lineno)
        entries.setdefault(i, []).append(GeomComponent(c, fields["g"], shift))
    else:
        raise SpecParseError(f"unknown component kind {kind!r}", line=lineno)


def load_source(path: str, ramify_specs: Tuple[str, ...] = (),
                prec: Optional[int] = None,
                prec_cap: Optional[int] = None) -> SpecSource:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecParseError(f"cannot read {path}: {exc}")
    source = parse_source(text, name_hint=path)
    for spec_text in ramify_specs:
        source = ramify(source, parse_ramify(spec_text))
    if prec is not None:
        source = replace(source, prec=prec)
    if prec_cap is not None:
        source = replace(source, prec_cap=prec_cap)
    return source


def parse_ramify(text: str) -> RamifyDirective:
    m = re.fullmatch(r"T(\d+)=S\^?(\d+)", text.strip())
    if not m:
        raise SpecParseError(
            f"ramify directive must look like T4=S^4, got {text!r}")
    return RamifyDirective(int(m.group(1)), int(m.group(2)))


def parse_spec(path: str, ramify_specs: Tuple[str, ...] = (),
               prec: Optional[int] = None,
               prec_cap: Optional[int] = None) -> ValuationSpec:
    return load_source(path, ramify_specs, prec, prec_cap).build()


# -- report rendering ----------------------------------------------------------


def _report_dict(report: algorithms.ResidueFieldReport, name: str) -> dict:
    gens = []
    for rec in report.generators:
        if rec.kind == "transcendental":
            gens.append({
                "index": rec.index,
                "kind": "transcendental",
                "prelim": [[c.canonical(), m] for c, m in rec.prelim],
                "residue": rec.u.canonical(),
                "representative": (rec.representative.canonical()
                                   if rec.representative is not None else None),
            })
        else:
            gens.append({
                "index": rec.index,
                "kind": "tower",
                "members": [c.canonical() for c in rec.members],
                "truncated": rec.truncated,
            })
    return {
        "name": name,
        "n": report.n,
        "dimension": report.dimension,
        "m": report.m,
        "uniformizer_status": report.uniformizer_status,
        "plateau": report.plateau,
        "inconclusive": report.inconclusive,
        "base_algebraics": [c.canonical() for c in report.base_algebraics],
        "generators": gens,
        "log": report.log.serialize().splitlines(),
        "spec_after": report.spec_after.canonical().splitlines(),
    }


def _uniformizer_text(result: algorithms.UniformizerResult) -> str:
    if result.status == "found":
        head = f"status found index={result.detail}"
    elif result.status == "gcd_plateau":
        head = f"status gcd_plateau d={result.detail}"
    else:
        head = f"status iteration_cap sweeps={result.detail}"
    lines = [head]
    if result.vanished:
        lines.append("vanished " + " ".join(str(i) for i in result.vanished))
    lines.append("log:")
    lines.extend(result.log.serialize().splitlines())
    lines.append("spec:")
    lines.extend(result.spec_after.canonical().splitlines())
    return "\n".join(lines)


# -- command dispatch -----------------------------------------------------------


def _build_argparser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="discval",
        description="parametric rank-one discrete valuations of Q((X1..Xn))")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, element=False):
        p.add_argument("specfile")
        if element:
            p.add_argument("element", help="K-element in the X-variable grammar")
        p.add_argument("--prec", type=int, default=None)
        p.add_argument("--prec-cap", type=int, default=None)
        p.add_argument("--ramify", action="append", default=[],
                       metavar="T<i>=S^<e>")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--max-iters", type=int,
                       default=algorithms.UNIFORMIZER_SWEEP_CAP)
        p.add_argument("--tower-depth", type=int,
                       default=algorithms.DEFAULT_TOWER_DEPTH)
        return p

    common(sub.add_parser("value", help="value of a K-element"), element=True)
    common(sub.add_parser("residue", help="residue of a value-0 element"),
           element=True)
    common(sub.add_parser("uniformizer", help="run the value-1 search"))
    common(sub.add_parser("residue-field", help="build the residue field"))
    common(sub.add_parser("implicit-ideal", help="truncated W-generators"))
    p = common(sub.add_parser("check-order", help="sampled order-function check"))
    p.add_argument("--max-degree", type=int, default=5)
    p.add_argument("--samples", type=int, default=20)
    p = common(sub.add_parser("extend", help="order function or rank lift"))
    p.add_argument("--samples", type=int, default=50)
    p = common(sub.add_parser("replay", help="re-apply a transform log"))
    p.add_argument("logfile")
    p.add_argument("--expect", default=None,
                   help="file holding the expected final spec dump")
    return parser


def run_command(command: str, specfile: str, args: List[str]) -> Tuple[int, str]:
    """Dispatch one CLI command; returns (exit code, report text)."""
    argv = [command, specfile] + list(args)
    parser = _build_argparser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return (4 if exc.code else 0), ""
    return _run(ns)


def _run(ns: argparse.Namespace) -> Tuple[int, str]:
    try:
        spec = parse_spec(ns.specfile, tuple(ns.ramify), ns.prec,
                          getattr(ns, "prec_cap", None))
        if ns.command == "value":
            v = value(spec, parse_kelem(ns.element, spec.n))
            return 0, str(v)
        if ns.command == "residue":
            r = residue(spec, parse_kelem(ns.element, spec.n))
            return 0, r.canonical()
        if ns.command == "uniformizer":
            result = algorithms.find_uniformizer(spec, ns.max_iters)
            code = 0 if result.found else 3
            return code, _uniformizer_text(result)
        if ns.command == "residue-field":
            report = algorithms.build_residue_field(
                spec, ns.tower_depth, ns.max_iters)
            text = json.dumps(_report_dict(report, spec.name), indent=2)
            return (3 if report.inconclusive else 0), text
        if ns.command == "implicit-ideal":
            report = algorithms.build_residue_field(
                spec, ns.tower_depth, ns.max_iters)
            gens = algorithms.implicit_ideal(spec, report)
            payload = [{
                "index": g.index,
                "display": g.display,
                "series": (g.series.render() if g.series is not None else None),
                "terms": [[c.canonical(), m] for c, m in g.pairs],
            } for g in gens]
            return 0, json.dumps(payload, indent=2)
        if ns.command == "check-order":
            check = algorithms.check_order_function(
                spec, ns.max_degree, ns.samples, ns.seed)
            return (0 if check.passed else 2), str(check)
        if ns.command == "extend":
            ext = algorithms.extend_to_order_function(
                spec, ns.tower_depth, ns.max_iters, ns.samples, ns.seed)
            payload = {
                "case": ext.case,
                "dimension": ext.report.dimension,
                "order_check": (str(ext.order_check)
                                if ext.order_check is not None else None),
                "table": [[row.label, list(row.vector)] for row in ext.table],
                "samples_checked": ext.samples_checked,
                "mismatches": ext.mismatches,
                "plateau": ext.plateau,
            }
            code = 0 if ext.case != "gcd_plateau" else 3
            if ext.case == "rank_lift" and ext.mismatches:
                code = 2
            if ext.case == "order_function" and not ext.order_check.passed:
                code = 2
            return code, json.dumps(payload, indent=2)
        if ns.command == "replay":
            with open(ns.logfile, "r", encoding="utf-8") as fh:
                log = parse_log(fh.read(), spec.s)
            final = log.apply(spec)
            dump = final.canonical()
            if ns.expect is not None:
                with open(ns.expect, "r", encoding="utf-8") as fh:
                    expected = fh.read().strip()
                if expected == dump.strip():
                    return 0, "replay: match"
                return 2, "replay: MISMATCH\n--- expected ---\n" + expected + \
                    "\n--- got ---\n" + dump
            return 0, dump
        return 4, f"unknown command {ns.command!r}"
    except SpecParseError as exc:
        return 4, f"parse error: {exc}"
    except (InconclusiveError, KernelSuspicionError, PrecisionCeilingError) as exc:
        return 3, f"inconclusive: {exc}"
    except EngineError as exc:
        return 2, f"error: {exc}"
    except ZeroDivisionError as exc:
        return 2, f"error: {exc}"


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_argparser()
    ns = parser.parse_args(argv)
    code, text = _run(ns)
    if text:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
