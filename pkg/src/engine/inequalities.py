"""Both sides of the generalized Dunkl-Williams bounds and their classical cases.

For x_1..x_n in X and a_1..a_n in A with every a_j and a_j - a_i a scalar
multiple of a coisometry,

    ||sum x_j a_j|| <= min_i ( ||sum x_j|| ||a_i|| + sum_j ||x_j|| ||a_j - a_i|| )
    ||sum x_j a_j|| >= max_i ( ||sum x_j|| ||a_i|| - sum_j ||x_j|| ||a_j - a_i|| )

Indices are 0-based. Ties in the optimizing index go to the smallest index
among the candidates within tol_eq of the optimum.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from ..core.algebra import ComplexMatrix, op_norm
from ..core.coisometry import CoisometryFamily, family_defects, make_reciprocal_norm_family
from ..core.errors import BoundViolation, InvalidInstance
from ..core.module_space import AlgebraElement, ModuleElement, module_norm, module_sum, right_action
from ..utils.config import DEFAULT_TOLERANCES, ToleranceConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Instance:
    """x_1..x_n in M_{m x d}(C) with coefficients a_1..a_n in M_d(C)."""
    xs: Tuple[ModuleElement, ...]
    as_: Tuple[AlgebraElement, ...]
    family_tag: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, 'xs', tuple(self.xs))
        object.__setattr__(self, 'as_', tuple(self.as_))

    @property
    def n(self) -> int:
        return len(self.xs)

    @property
    def d(self) -> int:
        return self.xs[0].algebra_dim

    @property
    def m(self) -> int:
        return self.xs[0].rows

    @classmethod
    def from_family(cls, xs: Sequence[ModuleElement], family: CoisometryFamily) -> 'Instance':
        return cls(xs=tuple(xs), as_=tuple(family.elems), family_tag=family.construction.value)


def element_norms(
    xs: Sequence[ModuleElement],
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> Tuple[Tuple[float, ...], float]:
    """(||x_1||, ..., ||x_n||) and ||sum x_j||."""
    return tuple(module_norm(x, tol) for x in xs), module_norm(module_sum(xs), tol)


def instance_defects(
    inst: Instance,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
    x_norms: Optional[Sequence[float]] = None,
) -> List[str]:
    """Every violated hypothesis of the bounds; empty when the instance is valid."""
    if inst.n < 2:
        return [f"need n >= 2 elements, got {inst.n}"]
    if len(inst.as_) != inst.n:
        return [f"{inst.n} module elements but {len(inst.as_)} coefficients"]
    defects = []
    shape = inst.xs[0].mat.shape
    for j, x in enumerate(inst.xs):
        if x.mat.shape != shape:
            defects.append(f"x_{j} has shape {x.mat.shape}, expected {shape}")
        elif (x_norms[j] if x_norms is not None else module_norm(x, tol)) <= tol.tol_eq:
            defects.append(f"x_{j} is zero")
    for j, a in enumerate(inst.as_):
        if a.algebra_dim != inst.d:
            defects.append(f"a_{j} is {a.algebra_dim}x{a.algebra_dim}, expected d={inst.d}")
    if not defects:
        defects.extend(family_defects(inst.as_, tol))
    return defects


def validate_instance(
    inst: Instance,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
    x_norms: Optional[Sequence[float]] = None,
) -> Instance:
    defects = instance_defects(inst, tol, x_norms)
    if defects:
        raise InvalidInstance('; '.join(defects))
    return inst


@dataclass(frozen=True)
class NormTable:
    """Every norm the bounds need; ``diff_norms[i][j]`` is ||a_j - a_i||."""
    lhs: float
    sum_norm: float
    x_norms: Tuple[float, ...]
    a_norms: Tuple[float, ...]
    diff_norms: Tuple[Tuple[float, ...], ...]

    def upper_terms(self) -> List[float]:
        return [
            self.sum_norm * self.a_norms[i]
            + sum(xn * dn for xn, dn in zip(self.x_norms, self.diff_norms[i]))
            for i in range(len(self.a_norms))
        ]

    def lower_terms(self) -> List[float]:
        return [
            self.sum_norm * self.a_norms[i]
            - sum(xn * dn for xn, dn in zip(self.x_norms, self.diff_norms[i]))
            for i in range(len(self.a_norms))
        ]


def combination(inst: Instance) -> ModuleElement:
    """sum_j x_j a_j."""
    return module_sum([right_action(x, a) for x, a in zip(inst.xs, inst.as_)])


def norm_table(
    inst: Instance,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
    x_norms: Optional[Sequence[float]] = None,
    sum_norm: Optional[float] = None,
) -> NormTable:
    """Norms for ``inst``; pass ``x_norms``/``sum_norm`` to reuse ones already computed for the same x_j."""
    n = inst.n
    diff = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            value = op_norm((inst.as_[j] - inst.as_[i]).mat, tol)
            diff[i][j] = diff[j][i] = value
    if x_norms is None or sum_norm is None:
        x_norms, sum_norm = element_norms(inst.xs, tol)
    return NormTable(
        lhs=module_norm(combination(inst), tol),
        sum_norm=sum_norm,
        x_norms=tuple(x_norms),
        a_norms=tuple(op_norm(a.mat, tol) for a in inst.as_),
        diff_norms=tuple(tuple(row) for row in diff),
    )


def select_min(values: Sequence[float], tol: ToleranceConfig = DEFAULT_TOLERANCES) -> Tuple[float, int]:
    """Minimum value and the smallest index within tol_eq of it."""
    best = min(values)
    band = tol.tol_eq * max(1.0, abs(best))
    index = next(i for i, value in enumerate(values) if value <= best + band)
    return best, index


def select_max(values: Sequence[float], tol: ToleranceConfig = DEFAULT_TOLERANCES) -> Tuple[float, int]:
    best = max(values)
    band = tol.tol_eq * max(1.0, abs(best))
    index = next(i for i, value in enumerate(values) if value >= best - band)
    return best, index


def minimizing_indices(values: Sequence[float], tol: ToleranceConfig = DEFAULT_TOLERANCES) -> List[int]:
    """All indices attaining the minimum within tol_eq, in index order."""
    best = min(values)
    band = tol.tol_eq * max(1.0, abs(best))
    return [i for i, value in enumerate(values) if value <= best + band]


def dw_upper_bound(inst: Instance, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> Tuple[float, int]:
    """min over i of ||sum x_j|| ||a_i|| + sum_j ||x_j|| ||a_j - a_i||, with its index."""
    validate_instance(inst, tol)
    return select_min(norm_table(inst, tol).upper_terms(), tol)


def dw_lower_bound(inst: Instance, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> Tuple[float, int]:
    """max over i of ||sum x_j|| ||a_i|| - sum_j ||x_j|| ||a_j - a_i||, with its index."""
    validate_instance(inst, tol)
    return select_max(norm_table(inst, tol).lower_terms(), tol)


@dataclass(frozen=True)
class BoundReport:
    lhs: float
    upper: float
    upper_argmin: int
    lower: float
    lower_argmax: int

    @property
    def slack_upper(self) -> float:
        return self.upper - self.lhs

    @property
    def slack_lower(self) -> float:
        return self.lhs - self.lower

    def violated(self, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> bool:
        return self.slack_upper < -tol.tol_eq or self.slack_lower < -tol.tol_eq


def report_from_table(table: NormTable, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> BoundReport:
    upper, upper_argmin = select_min(table.upper_terms(), tol)
    lower, lower_argmax = select_max(table.lower_terms(), tol)
    return BoundReport(
        lhs=table.lhs, upper=upper, upper_argmin=upper_argmin, lower=lower, lower_argmax=lower_argmax
    )


def check_theorem(
    inst: Instance,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
    table: Optional[NormTable] = None,
) -> BoundReport:
    """Evaluate both bounds and assert lower <= lhs <= upper within tol_eq.

    ``table`` is the instance's NormTable when the caller already built it.

    Raises:
        InvalidInstance: when the hypotheses fail.
        BoundViolation: never, unless the implementation is wrong.
    """
    validate_instance(inst, tol, table.x_norms if table is not None else None)
    report = report_from_table(table or norm_table(inst, tol), tol)
    if report.violated(tol):
        logger.warning("bound violation: lhs=%r upper=%r lower=%r", report.lhs, report.upper, report.lower)
        raise BoundViolation(
            f"lower={report.lower!r} <= lhs={report.lhs!r} <= upper={report.upper!r} fails",
            instance=inst,
            report=report,
        )
    return report


def equality_gap(inst: Instance, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
    """upper bound minus lhs; zero exactly on the equality case."""
    return check_theorem(inst, tol).slack_upper


# ------------------------------------------------------------ specializations

def pecaric_rajic_instance(
    xs: Sequence[ModuleElement],
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
    x_norms: Optional[Sequence[float]] = None,
) -> Instance:
    """The instance (x_j, (1/||x_j||) e) behind the Pecaric-Rajic bounds."""
    return Instance.from_family(xs, make_reciprocal_norm_family(xs, tol, norms=x_norms))


def pecaric_rajic_bounds(
    xs: Sequence[ModuleElement],
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
    x_norms: Optional[Sequence[float]] = None,
    sum_norm: Optional[float] = None,
) -> BoundReport:
    """Bounds for ||sum x_j / ||x_j|| || from the norms of the x_j alone."""
    if len(xs) < 2:
        raise InvalidInstance(f"need n >= 2 elements, got {len(xs)}")
    if x_norms is None or sum_norm is None:
        x_norms, sum_norm = element_norms(xs, tol)
    norms = list(x_norms)
    if min(norms) <= tol.tol_eq:
        raise InvalidInstance("every x_j must be nonzero")
    unit_sum = module_sum([x * (1.0 / norm) for x, norm in zip(xs, norms)])
    spreads = [sum(abs(other - norm) for other in norms) for norm in norms]
    upper, upper_argmin = select_min([(sum_norm + s) / norm for s, norm in zip(spreads, norms)], tol)
    lower, lower_argmax = select_max([(sum_norm - s) / norm for s, norm in zip(spreads, norms)], tol)
    return BoundReport(
        lhs=module_norm(unit_sum, tol),
        upper=upper,
        upper_argmin=upper_argmin,
        lower=lower,
        lower_argmax=lower_argmax,
    )


@dataclass(frozen=True)
class KatoReport:
    """Kato-Saito-Tamura refinement and reverse of the triangle inequality."""
    refined_upper_holds: bool
    reverse_holds: bool
    pr_sharper: bool
    sum_norm: float
    unit_sum_norm: float
    norm_total: float
    refined_lhs: float
    reverse_lhs: float


def kato_bounds(
    xs: Sequence[ModuleElement],
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
    x_norms: Optional[Sequence[float]] = None,
    sum_norm: Optional[float] = None,
    pr: Optional[BoundReport] = None,
) -> KatoReport:
    """Check ||sum x|| + (n - ||sum x/||x||||) min||x|| <= sum ||x|| and its max-reverse.

    ``pr_sharper`` records that the Pecaric-Rajic bounds on ||sum x_j/||x_j|| ||
    are at least as tight as the ones Kato's inequalities give.
    """
    n = len(xs)
    if x_norms is None or sum_norm is None:
        x_norms, sum_norm = element_norms(xs, tol)
    norms = list(x_norms)
    total = sum(norms)
    smallest, largest = min(norms), max(norms)
    if pr is None:
        pr = pecaric_rajic_bounds(xs, tol, norms, sum_norm)
    unit = pr.lhs

    refined_lhs = sum_norm + (n - unit) * smallest
    reverse_lhs = sum_norm + (n - unit) * largest
    kato_floor = (sum_norm + n * smallest - total) / smallest
    kato_ceiling = (sum_norm + n * largest - total) / largest
    scale = max(1.0, total)
    return KatoReport(
        refined_upper_holds=refined_lhs <= total + tol.tol_eq * scale,
        reverse_holds=reverse_lhs >= total - tol.tol_eq * scale,
        pr_sharper=(pr.lower >= kato_floor - tol.tol_eq * scale and pr.upper <= kato_ceiling + tol.tol_eq * scale),
        sum_norm=sum_norm,
        unit_sum_norm=unit,
        norm_total=total,
        refined_lhs=refined_lhs,
        reverse_lhs=reverse_lhs,
    )


@dataclass(frozen=True)
class InequalityCheck:
    lhs: float
    rhs: float
    holds: bool


@dataclass(frozen=True)
class TwoPointReport:
    """Dunkl-Williams, Maligranda and Mercer for a pair x, y.

    The classical statements concern x - y; the summation form evaluates them
    on (x, -y), reported in ``summation``.
    """
    dw: InequalityCheck
    maligranda: InequalityCheck
    mercer: InequalityCheck
    summation: BoundReport
    sign_convention: str = 'x - y evaluated as x + (-y)'


def classical_two_point(
    x: ModuleElement,
    y: ModuleElement,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
    norms: Optional[Tuple[float, float]] = None,
) -> TwoPointReport:
    nx, ny = norms if norms is not None else (module_norm(x, tol), module_norm(y, tol))
    if min(nx, ny) <= tol.tol_eq:
        raise InvalidInstance("x and y must be nonzero")
    lhs = module_norm(x * (1.0 / nx) - y * (1.0 / ny), tol)
    dist = module_norm(x - y, tol)
    gap = abs(nx - ny)
    slack = tol.tol_eq * max(1.0, lhs)

    dw_rhs = 4.0 * dist / (nx + ny)
    maligranda_rhs = (dist + gap) / max(nx, ny)
    mercer_rhs = (dist - gap) / min(nx, ny)
    return TwoPointReport(
        dw=InequalityCheck(lhs=lhs, rhs=dw_rhs, holds=lhs <= dw_rhs + slack),
        maligranda=InequalityCheck(lhs=lhs, rhs=maligranda_rhs, holds=lhs <= maligranda_rhs + slack),
        mercer=InequalityCheck(lhs=lhs, rhs=mercer_rhs, holds=lhs >= mercer_rhs - slack),
        # ||-y|| = ||y|| and ||x + (-y)|| = dist
        summation=pecaric_rajic_bounds([x, -y], tol, (nx, ny), dist),
    )


def scalar_multiple(inst: Instance, c: float) -> Instance:
    """Replace every x_j by c x_j."""
    return Instance(
        xs=tuple(ModuleElement(ComplexMatrix(x.mat.data * c)) for x in inst.xs),
        as_=inst.as_,
        family_tag=inst.family_tag,
    )


def _close(a: float, b: float, tol: ToleranceConfig) -> bool:
    return abs(a - b) <= tol.tol_eq * max(1.0, abs(a), abs(b))


def bound_report_defects(
    name: str,
    report: BoundReport,
    engine: BoundReport,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> List[str]:
    """Differences between a closed-form ``report`` and the engine's report on the same instance."""
    defects = []
    for field in ('lhs', 'upper', 'lower'):
        ours, theirs = getattr(report, field), getattr(engine, field)
        if not _close(ours, theirs, tol):
            defects.append(f"{name} {field} {ours!r} != engine {theirs!r}")
    for field in ('upper_argmin', 'lower_argmax'):
        ours, theirs = getattr(report, field), getattr(engine, field)
        if ours != theirs:
            defects.append(f"{name} {field} {ours} != engine {theirs}")
    if report.violated(tol):
        defects.append(f"{name} bounds violated")
    return defects


def two_point_defects(pair: TwoPointReport, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> List[str]:
    """Failed checks among the pair inequalities and their relations to each other."""
    defects = []
    for name in ('dw', 'maligranda', 'mercer'):
        if not getattr(pair, name).holds:
            defects.append(f"{name} inequality violated")
    if not _close(pair.maligranda.rhs, pair.summation.upper, tol):
        defects.append("maligranda bound differs from the summation upper bound")
    if pair.mercer.rhs > pair.summation.lower + tol.tol_eq * max(1.0, abs(pair.mercer.rhs)):
        defects.append("mercer bound exceeds the summation lower bound")
    if pair.maligranda.rhs > pair.dw.rhs + tol.tol_eq * max(1.0, abs(pair.dw.rhs)):
        defects.append("maligranda bound is weaker than dunkl-williams")
    return defects


def specialization_defects(
    xs: Sequence[ModuleElement],
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
    table: Optional[NormTable] = None,
) -> List[str]:
    """Cross-check the classical inequalities against the general engine on ``xs``.

    The Pecaric-Rajic bounds must coincide with the engine on the reciprocal
    norm family, optimizing indices included. Kato's refinement and reverse
    must hold and be no sharper. For pairs the Dunkl-Williams, Maligranda and
    Mercer inequalities must hold, Maligranda and Mercer must match the
    summation form on (x, -y), and Maligranda must not exceed Dunkl-Williams.

    ``table`` is a NormTable of any instance over the same ``xs``; its element
    norms are reused instead of recomputed.
    """
    if table is None:
        x_norms, sum_norm = element_norms(xs, tol)
    else:
        x_norms, sum_norm = table.x_norms, table.sum_norm
    pr = pecaric_rajic_bounds(xs, tol, x_norms, sum_norm)
    pr_inst = pecaric_rajic_instance(xs, tol, x_norms)
    engine = check_theorem(pr_inst, tol, norm_table(pr_inst, tol, x_norms, sum_norm))
    defects = bound_report_defects('pecaric-rajic', pr, engine, tol)

    kato = kato_bounds(xs, tol, x_norms, sum_norm, pr=pr)
    if not kato.refined_upper_holds:
        defects.append("kato refinement violated")
    if not kato.reverse_holds:
        defects.append("kato reverse violated")
    if not kato.pr_sharper:
        defects.append("pecaric-rajic bounds weaker than kato")

    if len(xs) == 2:
        defects.extend(two_point_defects(classical_two_point(xs[0], xs[1], tol, norms=tuple(x_norms)), tol))
    return defects
