"""State certificates for the equality cases of the generalized Dunkl-Williams bound.

For an instance attaining its upper bound at index i, equality is witnessed
by a state phi on M_d:

* when sum x_j != 0: phi(sum_j a_i* <x_j, x_k> (a_k - a_i))
  = ||sum x_j|| ||a_i|| ||x_k|| ||a_k - a_i|| for every k with a_k != a_i;
* when sum x_j = 0: for some l with a_l != a_i,
  phi((a_l - a_i)* <x_l, x_k> (a_k - a_i)) = ||a_l - a_i|| ||a_k - a_i|| ||x_l|| ||x_k||
  for every k != l with a_k != a_i.

Plain triangle equality ||sum x_j|| = sum ||x_j|| is the special case
phi <x_i, x_last> = ||x_i|| ||x_last||.
"""

import cmath
import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core.algebra import State, density_matrix_defect
from ..core.coisometry import make_scalar_family
from ..core.errors import DimensionMismatch, InvalidInstance, PreconditionViolated
from ..core.module_space import ModuleElement, inner_product, module_norm, module_sum
from ..utils.config import DEFAULT_TOLERANCES, ToleranceConfig
from .feasibility import (
    DEFAULT_RESTARTS,
    ConstraintSet,
    FeasibilityResult,
    check_state_against,
    solve_state_feasibility,
)
from .inequalities import (
    Instance,
    NormTable,
    minimizing_indices,
    norm_table,
    report_from_table,
    validate_instance,
)

logger = logging.getLogger(__name__)

# Disagreements within this many multiples of tol_feas are inconclusive
INCONCLUSIVE_FACTOR = 10.0


class CaseTag(Enum):
    SUM_NONZERO = 'SumNonzero'
    SUM_ZERO = 'SumZero'


@dataclass(frozen=True)
class Certificate:
    """A state witnessing equality at index ``i`` (and ``l`` in the sum-zero case)."""
    case_tag: CaseTag
    i: int
    state: State
    residuals: Tuple[float, ...] = ()
    feasible: bool = True
    l: Optional[int] = None

    @property
    def max_residual(self) -> float:
        return max(self.residuals, default=0.0)


@dataclass(frozen=True)
class VerificationResult:
    valid: bool
    residuals: Tuple[float, ...] = ()
    reason: Optional[str] = None


# ------------------------------------------------------------- triangle equality

def triangle_equality_constraints(
    xs: Sequence[ModuleElement],
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> ConstraintSet:
    """phi <x_i, x_last> = ||x_i|| ||x_last|| for every i before the last."""
    if len(xs) < 2:
        raise InvalidInstance(f"need at least two elements, got {len(xs)}")
    norms = [module_norm(x, tol) for x in xs]
    if min(norms) <= tol.tol_eq:
        raise InvalidInstance("triangle equality needs nonzero elements")
    last = xs[-1]
    return ConstraintSet.from_pairs(
        (inner_product(x, last).mat, norm * norms[-1]) for x, norm in zip(xs[:-1], norms[:-1])
    )


def triangle_equality_holds(xs: Sequence[ModuleElement], tol: ToleranceConfig = DEFAULT_TOLERANCES) -> bool:
    """Numerical test of ||sum x_j|| = sum ||x_j||."""
    total = sum(module_norm(x, tol) for x in xs)
    return abs(module_norm(module_sum(xs), tol) - total) <= tol.tol_eq * max(1.0, total)


def triangle_equality_state(
    xs: Sequence[ModuleElement],
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
    seed: int = 0,
) -> FeasibilityResult:
    """Search for the state witnessing ||sum x_j|| = sum ||x_j||."""
    return solve_state_feasibility(triangle_equality_constraints(xs, tol), xs[0].algebra_dim, tol, seed=seed)


# ------------------------------------------------------------ constraint builders

def _distinct(table: NormTable, i: int, k: int, tol: ToleranceConfig) -> bool:
    return table.diff_norms[i][k] > tol.tol_eq


def sum_nonzero_constraints(
    inst: Instance,
    i: int,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
    table: Optional[NormTable] = None,
) -> ConstraintSet:
    """phi(a_i* <sum x, x_k> (a_k - a_i)) = ||sum x|| ||a_i|| ||x_k|| ||a_k - a_i||, k with a_k != a_i."""
    table = table or norm_table(inst, tol)
    total = module_sum(inst.xs)
    a_i = inst.as_[i]
    pairs = []
    for k in range(inst.n):
        if not _distinct(table, i, k, tol):
            continue
        b = a_i.adjoint() @ inner_product(total, inst.xs[k]) @ (inst.as_[k] - a_i)
        c = table.sum_norm * table.a_norms[i] * table.x_norms[k] * table.diff_norms[i][k]
        pairs.append((b.mat, c))
    return ConstraintSet.from_pairs(pairs)


def sum_zero_constraints(
    inst: Instance,
    i: int,
    l: int,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
    table: Optional[NormTable] = None,
) -> ConstraintSet:
    """phi((a_l - a_i)* <x_l, x_k> (a_k - a_i)) = ||a_l - a_i|| ||a_k - a_i|| ||x_l|| ||x_k||."""
    table = table or norm_table(inst, tol)
    a_i = inst.as_[i]
    left = (inst.as_[l] - a_i).adjoint()
    pairs = []
    for k in range(inst.n):
        if k == l or not _distinct(table, i, k, tol):
            continue
        b = left @ inner_product(inst.xs[l], inst.xs[k]) @ (inst.as_[k] - a_i)
        c = table.diff_norms[i][l] * table.diff_norms[i][k] * table.x_norms[l] * table.x_norms[k]
        pairs.append((b.mat, c))
    return ConstraintSet.from_pairs(pairs)


def _certificate(
    case_tag: CaseTag,
    cs: ConstraintSet,
    result: FeasibilityResult,
    i: int,
    l: Optional[int],
    tol: ToleranceConfig,
) -> Certificate:
    residuals = tuple(float(r) for r in check_state_against(cs, result.state))
    return Certificate(
        case_tag=case_tag,
        i=i,
        l=l,
        state=result.state,
        residuals=residuals,
        feasible=bool(max(residuals, default=0.0) <= tol.tol_feas),
    )


def _require_case(inst: Instance, table: NormTable, sum_zero: bool, tol: ToleranceConfig):
    validate_instance(inst, tol)
    if not any(_distinct(table, i, k, tol) for i in range(inst.n) for k in range(i + 1, inst.n)):
        raise PreconditionViolated("all coefficients a_j coincide")
    if sum_zero and table.sum_norm > tol.tol_eq:
        raise PreconditionViolated(f"sum of x_j has norm {table.sum_norm:.3e}, expected zero")
    if not sum_zero and table.sum_norm <= tol.tol_eq:
        raise PreconditionViolated("sum of x_j is zero")


def certify_sum_nonzero(
    inst: Instance,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
    seed: int = 0,
    restarts: int = DEFAULT_RESTARTS,
) -> Optional[Certificate]:
    """First certificate over the minimizing indices in index order, or None.

    Raises:
        PreconditionViolated: when sum x_j = 0 or all a_j coincide.
    """
    table = norm_table(inst, tol)
    _require_case(inst, table, sum_zero=False, tol=tol)
    for i in minimizing_indices(table.upper_terms(), tol):
        cs = sum_nonzero_constraints(inst, i, tol, table)
        result = solve_state_feasibility(cs, inst.d, tol, restarts, seed)
        logger.debug("sum-nonzero candidate i=%d: %s", i, result.status.value)
        if result.feasible:
            return _certificate(CaseTag.SUM_NONZERO, cs, result, i, None, tol)
    return None


def certify_sum_zero(
    inst: Instance,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
    seed: int = 0,
    restarts: int = DEFAULT_RESTARTS,
) -> Optional[Certificate]:
    """First certificate in (i, l) lexicographic order, or None.

    Raises:
        PreconditionViolated: when sum x_j != 0 or all a_j coincide.
    """
    table = norm_table(inst, tol)
    _require_case(inst, table, sum_zero=True, tol=tol)
    for i in minimizing_indices(table.upper_terms(), tol):
        for l in range(inst.n):
            if not _distinct(table, i, l, tol):
                continue
            cs = sum_zero_constraints(inst, i, l, tol, table)
            result = solve_state_feasibility(cs, inst.d, tol, restarts, seed)
            logger.debug("sum-zero candidate (i=%d, l=%d): %s", i, l, result.status.value)
            if result.feasible:
                return _certificate(CaseTag.SUM_ZERO, cs, result, i, l, tol)
    return None


class Verdict(Enum):
    AGREE = 'agree'
    MISMATCH = 'mismatch'
    INCONCLUSIVE = 'inconclusive'


@dataclass(frozen=True)
class CertifyOutcome:
    """Certifier answer next to the numerical equality test it must agree with."""
    certificate: Optional[Certificate]
    equality: bool
    gap: float
    verdict: Verdict


def equality_detected(table: NormTable, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> Tuple[bool, float]:
    """(lhs equals the upper bound, upper - lhs)."""
    report = report_from_table(table, tol)
    gap = report.upper - report.lhs
    return abs(gap) <= tol.tol_eq * max(1.0, report.upper), gap


def certify(
    inst: Instance,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
    seed: int = 0,
    restarts: int = DEFAULT_RESTARTS,
) -> CertifyOutcome:
    """Dispatch on sum x_j and compare the certificate with the numerical equality test.

    ``seed`` and ``restarts`` drive the random starts of the state search.
    """
    table = norm_table(inst, tol)
    if table.sum_norm > tol.tol_eq:
        cert = certify_sum_nonzero(inst, tol, seed, restarts)
    else:
        cert = certify_sum_zero(inst, tol, seed, restarts)
    equality, gap = equality_detected(table, tol)
    if equality == (cert is not None):
        verdict = Verdict.AGREE
    elif abs(gap) <= INCONCLUSIVE_FACTOR * tol.tol_feas:
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.MISMATCH
        logger.warning("certifier disagrees with equality test: gap=%.3e, certificate=%s", gap, cert is not None)
    return CertifyOutcome(certificate=cert, equality=equality, gap=gap, verdict=verdict)


def verify_certificate(
    inst: Instance,
    cert: Certificate,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> VerificationResult:
    """Rebuild the certificate's constraints from scratch and evaluate its state.

    Raises:
        DimensionMismatch: when the state is not d x d for the instance.
    """
    if cert.state.dim != inst.d:
        raise DimensionMismatch(f"certificate state is {cert.state.dim}x{cert.state.dim}, instance has d={inst.d}")
    defect = density_matrix_defect(cert.state.rho, tol)
    if defect is not None:
        return VerificationResult(False, (), defect)
    if not 0 <= cert.i < inst.n:
        return VerificationResult(False, (), f"index i={cert.i} out of range")

    table = norm_table(inst, tol)
    sum_zero = table.sum_norm <= tol.tol_eq
    if sum_zero != (cert.case_tag is CaseTag.SUM_ZERO):
        return VerificationResult(False, (), f"case {cert.case_tag.value} does not match the instance")
    if cert.case_tag is CaseTag.SUM_ZERO:
        if cert.l is None or not 0 <= cert.l < inst.n or not _distinct(table, cert.i, cert.l, tol):
            return VerificationResult(False, (), f"index l={cert.l} is not admissible")
        cs = sum_zero_constraints(inst, cert.i, cert.l, tol, table)
    else:
        cs = sum_nonzero_constraints(inst, cert.i, tol, table)

    residuals = tuple(check_state_against(cs, cert.state))
    if max(residuals, default=0.0) > tol.tol_feas:
        return VerificationResult(False, residuals, "residual above tol_feas")
    return VerificationResult(True, residuals)


# ------------------------------------------------------------------- corollaries

def _phase(z: complex) -> complex:
    """cis(arg z)."""
    return cmath.exp(1j * cmath.phase(z))


def _scalar_instance(xs: Sequence[ModuleElement], alphas: Sequence[complex], tol: ToleranceConfig) -> Instance:
    alphas = [complex(alpha) for alpha in alphas]
    if len(alphas) != len(xs):
        raise PreconditionViolated(f"{len(xs)} elements but {len(alphas)} scalars")
    if any(abs(alpha) <= tol.tol_eq for alpha in alphas):
        raise PreconditionViolated("every alpha_j must be nonzero")
    if all(abs(alpha - alphas[0]) <= tol.tol_eq for alpha in alphas):
        raise PreconditionViolated("all alpha_j coincide")
    family = make_scalar_family(alphas, xs[0].algebra_dim, tol=tol)
    return validate_instance(Instance.from_family(xs, family), tol)


def scalar_phase_constraints(
    xs: Sequence[ModuleElement],
    alphas: Sequence[complex],
    i: int,
    l: Optional[int] = None,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> ConstraintSet:
    """Constraints for a_j = alpha_j e with the scalar factors folded into unit phases.

    Sum nonzero: cis(arg conj(alpha_i) + arg(alpha_k - alpha_i)) phi<sum x, x_k> = ||sum x|| ||x_k||.
    Sum zero: cis(arg conj(alpha_l - alpha_i) + arg(alpha_k - alpha_i)) phi<x_l, x_k> = ||x_l|| ||x_k||.
    """
    alphas = [complex(alpha) for alpha in alphas]
    norms = [module_norm(x, tol) for x in xs]
    pairs = []
    if l is None:
        total = module_sum(xs)
        total_norm = module_norm(total, tol)
        for k, alpha in enumerate(alphas):
            if abs(alpha - alphas[i]) <= tol.tol_eq:
                continue
            phase = _phase(alphas[i].conjugate()) * _phase(alpha - alphas[i])
            pairs.append((inner_product(total, xs[k]).mat * phase, total_norm * norms[k]))
    else:
        for k, alpha in enumerate(alphas):
            if k == l or abs(alpha - alphas[i]) <= tol.tol_eq:
                continue
            phase = _phase((alphas[l] - alphas[i]).conjugate()) * _phase(alpha - alphas[i])
            pairs.append((inner_product(xs[l], xs[k]).mat * phase, norms[l] * norms[k]))
    return ConstraintSet.from_pairs(pairs)


def _sign(value: float, tol: ToleranceConfig) -> int:
    if abs(value) <= tol.tol_eq:
        return 0
    return 1 if value > 0 else -1


def reciprocal_sign_constraints(
    xs: Sequence[ModuleElement],
    i: int,
    l: Optional[int] = None,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> ConstraintSet:
    """The phases for alpha_j = 1/||x_j||, written as signs of norm differences."""
    norms = [module_norm(x, tol) for x in xs]
    pairs = []
    if l is None:
        total = module_sum(xs)
        total_norm = module_norm(total, tol)
        for k in range(len(xs)):
            sign = _sign(norms[i] - norms[k], tol)
            if sign:
                pairs.append((inner_product(total, xs[k]).mat * sign, total_norm * norms[k]))
    else:
        left = _sign(norms[i] - norms[l], tol)
        for k in range(len(xs)):
            sign = _sign(norms[i] - norms[k], tol)
            if k != l and sign:
                pairs.append((inner_product(xs[l], xs[k]).mat * (left * sign), norms[l] * norms[k]))
    return ConstraintSet.from_pairs(pairs)


def _corollary_search(inst: Instance, build, tol: ToleranceConfig, seed: int) -> Optional[Certificate]:
    """Run the certifier search order with constraint sets produced by ``build(i, l)``."""
    table = norm_table(inst, tol)
    sum_zero = table.sum_norm <= tol.tol_eq
    for i in minimizing_indices(table.upper_terms(), tol):
        candidates = [l for l in range(inst.n) if _distinct(table, i, l, tol)] if sum_zero else [None]
        for l in candidates:
            cs = build(i, l)
            result = solve_state_feasibility(cs, inst.d, tol, seed=seed)
            if result.feasible:
                tag = CaseTag.SUM_ZERO if sum_zero else CaseTag.SUM_NONZERO
                return _certificate(tag, cs, result, i, l, tol)
    return None


def corollary_scalar_condition(
    xs: Sequence[ModuleElement],
    alphas: Sequence[complex],
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
    seed: int = 0,
) -> Optional[Certificate]:
    """Equality certificate for a_j = alpha_j e using the phase form of the constraints.

    Raises:
        PreconditionViolated: when some alpha_j is zero or all alpha_j coincide.
    """
    inst = _scalar_instance(xs, alphas, tol)
    return _corollary_search(inst, lambda i, l: scalar_phase_constraints(xs, alphas, i, l, tol), tol, seed)


def reciprocal_phase_defects(
    xs: Sequence[ModuleElement],
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> List[str]:
    """Candidates (i, l) where the sign form differs from the phase form with alpha_j = 1/||x_j||."""
    norms = [module_norm(x, tol) for x in xs]
    alphas = [1.0 / norm for norm in norms]
    sum_zero = module_norm(module_sum(xs), tol) <= tol.tol_eq
    defects = []
    for i in range(len(xs)):
        partners = [l for l in range(len(xs)) if abs(alphas[l] - alphas[i]) > tol.tol_eq]
        for l in (partners if sum_zero else [None]):
            phased = scalar_phase_constraints(xs, alphas, i, l, tol)
            signed = reciprocal_sign_constraints(xs, i, l, tol)
            if len(phased) != len(signed) or any(
                float(np.linalg.norm(p.b.data - s.b.data)) > tol.tol_eq * max(1.0, s.c) or abs(p.c - s.c) > tol.tol_eq
                for p, s in zip(phased, signed)
            ):
                defects.append(f"sign and phase constraints differ at i={i}, l={l}")
    return defects


def corollary_norm_reciprocal_condition(
    xs: Sequence[ModuleElement],
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
    seed: int = 0,
) -> Optional[Certificate]:
    """Equality certificate for alpha_j = 1/||x_j||, the Pecaric-Rajic case.

    Raises:
        PreconditionViolated: when every x_j has the same norm, or when the sign form of
            the constraints disagrees with the phase form.
    """
    norms = [module_norm(x, tol) for x in xs]
    if min(norms) <= tol.tol_eq:
        raise PreconditionViolated("every x_j must be nonzero")
    if max(norms) - min(norms) <= tol.tol_eq:
        raise PreconditionViolated("all x_j have the same norm")
    defects = reciprocal_phase_defects(xs, tol)
    if defects:
        raise PreconditionViolated('; '.join(defects))
    inst = _scalar_instance(xs, [1.0 / norm for norm in norms], tol)
    return _corollary_search(inst, lambda i, l: reciprocal_sign_constraints(xs, i, l, tol), tol, seed)
