"""Named procedures: normalization, uniformizer search, residue-field build.

The loops below convert the non-effective descent arguments into decidable
partial procedures: every chain carries an iteration cap and every "cannot
tell" outcome is reported as such (plateau evidence, truncated towers,
kernel suspicion) instead of being forced to a verdict.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .errors import (ContractError, InconclusiveError, KernelSuspicionError,
                     RepresentativeMissingError, StructuralError)
from .kfield import KElem, TruncatedXSeries, XPoly, random_form
from .ratfunc import RatFunc
from .transforms import (CoordChange, Monoidal, Permute, TransformLog,
                         apply_step)
from .tseries import Value
from .valuation import ValuationSpec, eval_psi, value

UNIFORMIZER_SWEEP_CAP = 64
CHAIN_STEP_CAP = 64
DEFAULT_TOWER_DEPTH = 8


# ---------------------------------------------------------------------------
# gcd normalization (euclidean algorithm on entry values)
# ---------------------------------------------------------------------------


def _entry_values(spec: ValuationSpec, live) -> Dict[int, int]:
    values = {}
    for i in live:
        v = spec.entry(i).order()
        if not v.is_exact:
            raise KernelSuspicionError(
                f"entry X{i} has uncertified order {v}; cannot normalize")
        values[i] = v.amount
    return values


def _swap_perm(n: int, a: int, b: int) -> Permute:
    perm = list(range(1, n + 1))
    perm[a - 1], perm[b - 1] = perm[b - 1], perm[a - 1]
    return Permute(tuple(perm))


def _normalize(spec: ValuationSpec, log: TransformLog, live) -> Tuple[ValuationSpec, int]:
    """Equalize the values of the live entries; returns the common value."""
    values = _entry_values(spec, live)
    while True:
        imin = min(live, key=lambda i: (values[i], i))
        if imin != 1:
            step = _swap_perm(spec.n, 1, imin)
            new = apply_step(spec, step)
            log.record(step, spec, new)
            spec = new
            values[1], values[imin] = values[imin], values[1]
        alpha = values[1]
        for i in sorted(live):
            if i == 1 or values[i] == alpha:
                continue
            q, r = divmod(values[i], alpha)
            steps = q if r else q - 1
            for _ in range(steps):
                step = Monoidal(1, i)
                new = apply_step(spec, step)
                log.record(step, spec, new)
                spec = new
            values[i] = r if r else alpha
        if all(values[i] == alpha for i in live):
            return spec, alpha


def gcd_normalize(spec: ValuationSpec) -> Tuple[ValuationSpec, TransformLog]:
    """Monoidal steps until every entry has value gcd(initial values)."""
    log = TransformLog()
    spec, _ = _normalize(spec, log, set(range(1, spec.n + 1)))
    return spec, log


# ---------------------------------------------------------------------------
# uniformizer search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UniformizerResult:
    status: str                       # "found" | "gcd_plateau" | "iteration_cap"
    detail: int                       # entry index / plateau value / sweeps run
    spec_after: ValuationSpec
    log: TransformLog
    vanished: Tuple[int, ...] = ()
    constants: Tuple[RatFunc, ...] = ()
    kill_history: Dict[int, Tuple[RatFunc, ...]] = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.status == "found"


def find_uniformizer(spec: ValuationSpec,
                     max_iters: int = UNIFORMIZER_SWEEP_CAP) -> UniformizerResult:
    """Alternate normalization with constant-residue coordinate changes.

    A sweep subtracts c*Y1 from every variable whose leading-coefficient
    ratio against Y1 is a rational constant.  A sweep with nothing to do
    ends the search: Found if the common value is 1, plateau evidence
    otherwise.  Vanished variables (subtraction indistinguishable from zero)
    are retired from play.
    """
    log = TransformLog()
    live = set(range(1, spec.n + 1))
    dead: set = set()
    kills: Dict[int, List[RatFunc]] = {}
    constants: List[RatFunc] = []
    spec, alpha = _normalize(spec, log, live)
    sweeps = 0
    while sweeps < max_iters:
        sweeps += 1
        acted = False
        for i in sorted(live - dead - {1}):
            ratio = spec.entry(i).leading_coeff() / spec.entry(1).leading_coeff()
            if not ratio.is_const():
                continue
            step = CoordChange(i, ((ratio, 1),))
            try:
                new = apply_step(spec, step)
                log.record(step, spec, new)
                spec = new
            except KernelSuspicionError as exc:
                log.record(step, spec, exc.spec_after)
                spec = exc.spec_after
                dead.add(i)
            kills.setdefault(i, []).append(ratio)
            constants.append(ratio)
            acted = True
        if not acted:
            status = ("found", 1) if alpha == 1 else ("gcd_plateau", alpha)
            return UniformizerResult(
                status[0], status[1], spec, log, tuple(sorted(dead)),
                _dedupe(constants),
                {i: tuple(v) for i, v in kills.items()})
        spec, alpha = _normalize(spec, log, live - dead)
    return UniformizerResult(
        "iteration_cap", sweeps, spec, log, tuple(sorted(dead)),
        _dedupe(constants), {i: tuple(v) for i, v in kills.items()})


def _dedupe(items: Sequence[RatFunc]) -> Tuple[RatFunc, ...]:
    seen = []
    for item in items:
        if item not in seen:
            seen.append(item)
    return tuple(seen)


# ---------------------------------------------------------------------------
# transcendence testing (Jacobian rank criterion, char 0)
# ---------------------------------------------------------------------------


def is_algebraic_over(gens: Sequence[RatFunc], r: RatFunc, trials: int = 8,
                      rng: Optional[random.Random] = None) -> bool:
    """Exact verdict: is r algebraic over Q(gens)?

    Criterion: adjoining the partials row of r must not raise the rank of
    the Jacobian of the generators.  Rank is computed by exact Gaussian
    elimination over the rational-function field; random evaluation only
    pre-screens pivot choice.
    """
    if not r:
        raise ContractError("transcendence test needs nonzero inputs")
    for g in gens:
        if not g:
            raise ContractError("transcendence test needs nonzero inputs")
        if g.nvars != r.nvars:
            raise StructuralError("mixed parameter arities")
    rng = rng or random.Random(0)
    rows = [_jacobian_row(g) for g in gens]
    base_rank = _rank(rows, r.nvars, rng, trials)
    rows.append(_jacobian_row(r))
    return _rank(rows, r.nvars, rng, trials) == base_rank


def _jacobian_row(f: RatFunc) -> List[RatFunc]:
    return [f.derivative(slot) for slot in range(f.nvars)]


def _rank(rows: Sequence[Sequence[RatFunc]], width: int, rng: random.Random,
          trials: int) -> int:
    matrix = [list(row) for row in rows]
    rank = 0
    for col in range(width):
        pivot = _pick_pivot(matrix, rank, col, rng, trials)
        if pivot is None:
            continue
        matrix[rank], matrix[pivot] = matrix[pivot], matrix[rank]
        inv = matrix[rank][col].inverse()
        for rr in range(rank + 1, len(matrix)):
            factor = matrix[rr][col] * inv
            if factor:
                for cc in range(col, width):
                    matrix[rr][cc] = matrix[rr][cc] - factor * matrix[rank][cc]
        rank += 1
        if rank == len(matrix):
            break
    return rank


def _pick_pivot(matrix, start: int, col: int, rng: random.Random,
                trials: int) -> Optional[int]:
    candidates = [i for i in range(start, len(matrix)) if matrix[i][col]]
    if not candidates:
        return None
    if len(candidates) > 1:
        width = len(matrix[0])
        for _ in range(trials):
            point = [rng.randint(-9, 9) for _ in range(width)]
            for i in candidates:
                try:
                    if matrix[i][col].evaluate(point):
                        return i
                except Exception:
                    continue
    return candidates[0]


# ---------------------------------------------------------------------------
# residue field construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Transcendental:
    index: int
    prelim: Tuple[Tuple[RatFunc, int], ...]
    u: RatFunc
    representative: Optional[KElem] = None

    kind = "transcendental"


@dataclass(frozen=True)
class AlgebraicTower:
    index: int
    pairs: Tuple[Tuple[RatFunc, int], ...]
    truncated: bool
    extra_members: Tuple[RatFunc, ...] = ()

    kind = "tower"

    @property
    def members(self) -> Tuple[RatFunc, ...]:
        return self.extra_members + tuple(c for c, _ in self.pairs)


GeneratorRecord = Union[Transcendental, AlgebraicTower]


@dataclass(frozen=True)
class ResidueFieldReport:
    n: int
    base_algebraics: Tuple[RatFunc, ...]
    generators: Tuple[GeneratorRecord, ...]
    m: int
    dimension: int
    log: TransformLog
    spec_after: ValuationSpec
    uniformizer_status: str
    inconclusive: bool = False
    plateau: Optional[int] = None

    def generator_at(self, index: int) -> GeneratorRecord:
        for g in self.generators:
            if g.index == index:
                return g
        raise StructuralError(f"no generator record for variable {index}")


def first_transcendental_residue(
        spec: ValuationSpec,
        max_iters: int = UNIFORMIZER_SWEEP_CAP
) -> Tuple[ValuationSpec, RatFunc, TransformLog]:
    """Arrange the spec so residue(Y2/Y1) is transcendental over the constants."""
    uni = find_uniformizer(spec, max_iters)
    if not uni.found:
        raise InconclusiveError(
            f"uniformizer search ended with {uni.status}; no certified "
            f"transcendental residue")
    work, log = uni.spec_after, uni.log
    for i in range(2, work.n + 1):
        if i in uni.vanished:
            continue
        ratio = work.entry(i).leading_coeff() / work.entry(1).leading_coeff()
        if ratio.is_const():
            continue
        if i != 2:
            step = _swap_perm(work.n, 2, i)
            new = apply_step(work, step)
            log.record(step, work, new)
            work = new
        return work, ratio, log
    raise InconclusiveError(
        "every residue chain ended in constants at working precision")


def build_residue_field(spec: ValuationSpec,
                        tower_depth_cap: int = DEFAULT_TOWER_DEPTH,
                        max_iters: int = UNIFORMIZER_SWEEP_CAP) -> ResidueFieldReport:
    """Classify every variable and assemble the residue field description."""
    original = spec
    log = TransformLog()
    base_constants: List[RatFunc] = []
    work = spec
    restarts_left = None
    uni = None
    while True:
        uni = find_uniformizer(work, max_iters)
        log.extend(uni.log)
        work = uni.spec_after
        base_constants.extend(uni.constants)
        inconclusive = uni.status == "iteration_cap"
        alpha = work.entry(1).order().amount
        if restarts_left is None:
            restarts_left = alpha + 1
        dead = set(uni.vanished)
        records: Dict[int, GeneratorRecord] = {}
        for i in dead:
            records[i] = AlgebraicTower(i, (), truncated=True,
                                        extra_members=uni.kill_history.get(i, ()))
        gens: List[RatFunc] = []
        param_reprs: Dict[int, KElem] = {}
        restart = False
        for i in range(2, work.n + 1):
            if i in dead:
                continue
            work, record, restart = _descend_variable(
                original, work, log, i, alpha, gens, param_reprs,
                tower_depth_cap)
            if restart:
                break
            records[i] = record
        if restart:
            restarts_left -= 1
            if restarts_left <= 0:
                raise InconclusiveError(
                    "normalization restarts did not stabilize; giving up")
            continue
        break

    transc = sorted(i for i, rec in records.items() if rec.kind == "transcendental")
    towers = sorted(i for i, rec in records.items() if rec.kind == "tower")
    order = [1] + transc + towers
    if order != list(range(1, work.n + 1)):
        step = Permute(tuple(order))
        new = apply_step(work, step)
        log.record(step, work, new)
        work = new
        relabel = {old: pos + 1 for pos, old in enumerate(order)}
        records = {relabel[i]: _with_index(rec, relabel[i])
                   for i, rec in records.items()}

    dimension = sum(1 for rec in records.values() if rec.kind == "transcendental")
    generators = tuple(records[i] for i in sorted(records))
    return ResidueFieldReport(
        n=work.n,
        base_algebraics=_dedupe(base_constants),
        generators=generators,
        m=dimension + 1,
        dimension=dimension,
        log=log,
        spec_after=work,
        uniformizer_status=uni.status,
        inconclusive=inconclusive,
        plateau=alpha if uni.status == "gcd_plateau" else None)


def _with_index(rec: GeneratorRecord, index: int) -> GeneratorRecord:
    if rec.kind == "transcendental":
        return Transcendental(index, rec.prelim, rec.u, rec.representative)
    return AlgebraicTower(index, rec.pairs, rec.truncated, rec.extra_members)


def _descend_variable(original, work, log, i, alpha, gens, param_reprs,
                      tower_depth_cap):
    """Run the residue-subtraction chain for one variable.

    Returns (spec, record, restart); restart means a value not divisible by
    the common value appeared (the whole build restarts at a smaller value).

    The chain runs on a scratch copy.  Its steps become real transformations
    only when they lead somewhere (a transcendental residue, or a restart);
    a tower verdict leaves the variable's full normalized series in place,
    which is the presentation the final embedding wants and what the
    implicit-ideal expansion reads back.
    """
    prelim: List[Tuple[RatFunc, int]] = []
    probe = work
    scratch = TransformLog()
    for _ in range(CHAIN_STEP_CAP):
        vi = probe.entry(i).order()
        if not vi.is_exact:
            return work, _tower(i, prelim, tower_depth_cap), False
        beta = vi.amount
        if beta % alpha != 0:
            log.extend(scratch)
            return probe, None, True
        m = beta // alpha
        w = probe.entry(i).leading_coeff() / probe.entry(1).leading_coeff() ** m
        if not is_algebraic_over(gens, w):
            log.extend(scratch)
            work = probe
            rep = _attempt_representative(original, log, work.n, i, m, w)
            record = Transcendental(i, tuple(prelim), w, rep)
            gens.append(w)
            for _ in range(m - 1):
                step = Monoidal(1, i)
                new = apply_step(work, step)
                log.record(step, work, new)
                work = new
            slot = w.single_param_slot()
            if slot is not None and _series_matches(
                    work.entry(i), work.entry(1).scale(w)):
                # the entry is exactly u * (first entry): Y_i/Y1 represents u
                # in the current coordinates, usable by later kill steps
                param_reprs[slot] = (KElem.var(work.n, i - 1)
                                     / KElem.var(work.n, 0))
            return work, record, False
        rep = _substitute_repr(w, param_reprs)
        step = CoordChange(i, ((w, m),), (rep,))
        prelim.append((w, m))
        try:
            new = apply_step(probe, step)
            scratch.record(step, probe, new)
            probe = new
        except KernelSuspicionError:
            return work, _tower(i, prelim, tower_depth_cap), False
    return work, _tower(i, prelim, tower_depth_cap), False


def _tower(i: int, prelim, tower_depth_cap: int) -> AlgebraicTower:
    """Situation-3 record; members beyond the reporting depth are dropped.

    The flag is always set: a vanished chain cannot be certified complete at
    finite precision, and a capped one is truncated by construction.
    """
    return AlgebraicTower(i, tuple(prelim[:tower_depth_cap]), truncated=True)


def _substitute_repr(w: RatFunc, param_reprs: Dict[int, KElem]) -> Optional[KElem]:
    """K-representative of a coefficient, via registered exact-image params."""
    if w.is_const():
        return None  # pullback handles constants natively
    slots = w.param_slots()
    if not slots or not slots.issubset(param_reprs):
        return None
    n = next(iter(param_reprs.values())).nvars
    images = [param_reprs.get(slot, KElem.one(n)) for slot in range(w.nvars)]
    return w.subst_params(images)


def _series_matches(a, b) -> bool:
    p = min(a.prec, b.prec)
    return a.truncate(p).coeffs == b.truncate(p).coeffs


def _attempt_representative(original, log, n, i, m, w) -> Optional[KElem]:
    """Pull Y_i / Y1^m back to the original coordinates and verify it."""
    candidate = KElem.var(n, i - 1) / KElem.var(n, 0) ** m
    try:
        rep = log.pullback(candidate)
        image = eval_psi(original, rep)
    except (RepresentativeMissingError, KernelSuspicionError, ContractError):
        return None
    v = image.order()
    if not (v.is_exact and v.amount == 0 and image.leading_coeff() == w):
        return None
    return rep


# ---------------------------------------------------------------------------
# implicit ideal
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ImplicitGenerator:
    index: int
    pairs: Tuple[Tuple[RatFunc, int], ...]
    series: Optional[object]  # TruncatedXSeries when rationally expressible
    display: str


def implicit_ideal(spec: ValuationSpec,
                   report: ResidueFieldReport) -> List[ImplicitGenerator]:
    """One truncated W-generator per tower variable, at spec precision."""
    if report.dimension >= report.n - 1:
        return []
    after = report.spec_after
    new_reprs = _new_coordinate_reprs(report)
    out = []
    for rec in report.generators:
        if rec.kind != "tower":
            continue
        pairs = _expand_chain(after, rec.index, after.prec)
        display = f"X{rec.index}" + "".join(
            f"-({c.canonical()})*X1^{m}" for c, m in pairs)
        series = _rational_series(after.n, rec.index, pairs, new_reprs,
                                  after.prec)
        out.append(ImplicitGenerator(rec.index, tuple(pairs), series, display))
    return out


def _expand_chain(after: ValuationSpec, k: int, prec: int):
    """Coefficients of Y_k as a series in Y1, out to the spec precision."""
    base = after.entry(1)
    z = after.entry(k)
    lc1 = base.leading_coeff()
    pairs = []
    while True:
        v = z.order()
        if not v.is_exact or v.amount >= prec:
            break
        beta = v.amount
        w = z.leading_coeff() / lc1 ** beta
        pairs.append((w, beta))
        z = z - (base ** beta).scale(w)
    return pairs


def _new_coordinate_reprs(report: ResidueFieldReport) -> Dict[int, KElem]:
    """Parameter -> Y_p/Y1 for generators realized exactly as u*t."""
    after = report.spec_after
    base = after.entry(1)
    reprs: Dict[int, KElem] = {}
    for rec in report.generators:
        if rec.kind != "transcendental":
            continue
        slot = rec.u.single_param_slot()
        if slot is None:
            continue
        if _series_matches(after.entry(rec.index), base.scale(rec.u)):
            reprs[slot] = (KElem.var(after.n, rec.index - 1)
                           / KElem.var(after.n, 0))
    return reprs


def _rational_series(n, k, pairs, new_reprs, prec):
    acc = KElem.var(n, k - 1)
    x1 = KElem.var(n, 0)
    for w, m in pairs:
        if w.is_const():
            term = KElem.const(n, w.const_value())
        else:
            slots = w.param_slots()
            if not slots.issubset(new_reprs):
                return None
            images = [new_reprs.get(slot, KElem.one(n)) for slot in range(w.nvars)]
            term = w.subst_params(images)
        acc = acc - term * x1 ** m
    if not (acc.den.is_const() and acc.den.const_value() == 1):
        return None
    terms = {e: c for e, c in acc.num.terms.items() if sum(e) < prec}
    return TruncatedXSeries(n, terms, prec)


# ---------------------------------------------------------------------------
# order-function checks and the rank-lift extension
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrderCheck:
    passed: bool
    max_degree: int
    samples_per_degree: int
    witness: Optional[XPoly] = None

    def __str__(self):
        if self.passed:
            return f"Pass (degrees 1..{self.max_degree})"
        return f"Fail witness={self.witness.render()}"


def check_order_function(spec: ValuationSpec, max_degree: int,
                         samples_per_degree: int, seed: int = 0) -> OrderCheck:
    """Sample homogeneous forms; every degree-r form must have value r."""
    for i in range(1, spec.n + 1):
        v = spec.entry(i).order()
        if not (v.is_exact and v.amount == 1):
            raise ContractError(
                f"order check needs every entry at value Exact 1; X{i} is {v}")
    rng = random.Random(seed)
    for r in range(1, max_degree + 1):
        for _ in range(samples_per_degree):
            form = random_form(spec.n, r, budget=3, rng=rng)
            v = value(spec, KElem(form))
            if not (v.is_exact and v.amount == r):
                return OrderCheck(False, max_degree, samples_per_degree, form)
    return OrderCheck(True, max_degree, samples_per_degree)


@dataclass(frozen=True)
class RankLiftRow:
    label: str
    vector: Tuple[int, ...]


@dataclass(frozen=True)
class OrderExtensionReport:
    case: str                       # "order_function" | "rank_lift" | "gcd_plateau"
    report: ResidueFieldReport
    order_check: Optional[OrderCheck] = None
    table: Tuple[RankLiftRow, ...] = ()
    samples_checked: int = 0
    mismatches: int = 0
    plateau: Optional[int] = None


def extend_to_order_function(spec: ValuationSpec,
                             tower_depth_cap: int = DEFAULT_TOWER_DEPTH,
                             max_iters: int = UNIFORMIZER_SWEEP_CAP,
                             samples: int = 50,
                             seed: int = 0) -> OrderExtensionReport:
    """Case 1: the transformed valuation is the order function (dim = n-1).

    Case 2: emit the rank-lift value table for (Y1..Ym, W_{m+1}..W_n) and
    verify on random K-elements that the lifted value is (0,...,0,v(f)).
    """
    report = build_residue_field(spec, tower_depth_cap, max_iters)
    if report.uniformizer_status == "iteration_cap":
        raise InconclusiveError("residue-field construction was inconclusive")
    if report.plateau is not None:
        return OrderExtensionReport("gcd_plateau", report, plateau=report.plateau)
    n, m = report.n, report.m
    if report.dimension == n - 1:
        check = check_order_function(report.spec_after, max_degree=5,
                                     samples_per_degree=20, seed=seed)
        return OrderExtensionReport("order_function", report, order_check=check)
    rank = n - m + 1
    rows = [RankLiftRow(f"Y{i}", (0,) * (rank - 1) + (1,))
            for i in range(1, m + 1)]
    for k in range(m + 1, n + 1):
        vec = [0] * rank
        vec[n - k] = 1
        rows.append(RankLiftRow(f"W{k}", tuple(vec)))
    rng = random.Random(seed)
    checked = 0
    mismatches = 0
    prev = None
    for _ in range(samples):
        f = _random_kelem(spec.n, rng)
        v = value(spec, f)
        checked += 1
        if not v.is_exact:
            mismatches += 1
            continue
        lift = (0,) * (rank - 1) + (v.amount,)
        if prev is not None:
            prod_v = value(spec, prev[0] * f)
            expect = prev[1][-1] + v.amount
            if not (prod_v.is_exact and prod_v.amount == expect):
                mismatches += 1
        prev = (f, lift)
    return OrderExtensionReport("rank_lift", report, table=tuple(rows),
                                samples_checked=checked, mismatches=mismatches)


def _random_kelem(n: int, rng: random.Random) -> KElem:
    while True:
        num = random_form(n, rng.randint(1, 2), budget=2, rng=rng)
        if rng.random() < 0.5:
            num = num + random_form(n, rng.randint(1, 2), budget=1, rng=rng)
        den = random_form(n, rng.randint(0, 1), budget=2, rng=rng)
        if num and den:
            return KElem(num, den)
