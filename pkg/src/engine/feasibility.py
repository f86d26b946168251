"""State feasibility: find a density matrix rho with trace(rho b_k) = c_k for all k.

The search is projected gradient descent on

    F(rho) = sum_k |trace(rho b_k) - c_k|^2

over the set of density matrices. A Cauchy-Schwarz fast path certifies
infeasibility whenever some c_k exceeds ||b_k||, since |phi(b)| <= ||b|| for
every state phi. Any other failure is only a numerical verdict.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..core.algebra import ComplexMatrix, State, as_matrix, herm_eig, op_norm
from ..core.errors import DimensionMismatch, InvalidParameters
from ..utils.config import DEFAULT_TOLERANCES, ToleranceConfig

logger = logging.getLogger(__name__)

# Random pure-state restarts after the deterministic starts
DEFAULT_RESTARTS = 5

_EPS = np.finfo(np.float64).eps


@dataclass(frozen=True)
class Constraint:
    """Require trace(rho b) = c with zero imaginary part."""
    b: ComplexMatrix
    c: float


@dataclass(frozen=True)
class ConstraintSet:
    targets: Tuple[Constraint, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'targets', tuple(self.targets))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[object, float]]) -> 'ConstraintSet':
        return cls(tuple(Constraint(b=as_matrix(b), c=float(c)) for b, c in pairs))

    def __len__(self) -> int:
        return len(self.targets)

    def __iter__(self):
        return iter(self.targets)

    @property
    def is_empty(self) -> bool:
        return not self.targets

    def stacked(self) -> Tuple[np.ndarray, np.ndarray]:
        """(K, d, d) array of the b_k and the vector of c_k."""
        bs = np.stack([t.b.data for t in self.targets])
        cs = np.array([t.c for t in self.targets], dtype=np.float64)
        return bs, cs

    def values(self, rho: np.ndarray) -> np.ndarray:
        """trace(rho b_k) for every k."""
        bs, _ = self.stacked()
        return np.einsum('ij,kji->k', rho, bs)

    def residuals(self, rho) -> List[float]:
        """|Re trace(rho b_k) - c_k| and |Im trace(rho b_k)|, interleaved per constraint."""
        if self.is_empty:
            return []
        rho = as_matrix(rho).data
        _, cs = self.stacked()
        out = []
        for value, c in zip(self.values(rho), cs):
            out.extend((float(abs(value.real - c)), float(abs(value.imag))))
        return out

    def shifted(self, delta: float) -> 'ConstraintSet':
        """Every c_k moved by ``delta``."""
        return ConstraintSet(tuple(Constraint(t.b, t.c + delta) for t in self.targets))


class FeasibilityStatus(Enum):
    FEASIBLE = 'feasible'
    INFEASIBLE_BY_NORM = 'infeasible_by_norm'
    RESIDUAL_ABOVE_TOL = 'residual_above_tol'


@dataclass(frozen=True)
class FeasibilityResult:
    """Solver outcome; ``state`` is set only when feasible.

    ``residual`` is sqrt(F) at the best point found, or the largest excess
    c_k - ||b_k|| on the norm fast path.
    """
    status: FeasibilityStatus
    state: Optional[State] = None
    residual: float = 0.0
    iterations: int = 0

    @property
    def feasible(self) -> bool:
        return self.status is FeasibilityStatus.FEASIBLE


def project_to_simplex(values: np.ndarray) -> np.ndarray:
    """Euclidean projection of a real vector onto the probability simplex."""
    v = np.asarray(values, dtype=np.float64)
    u = np.sort(v)[::-1]
    cssv = np.cumsum(u) - 1.0
    ind = np.arange(1, v.size + 1)
    active = u - cssv / ind > 0
    r = int(ind[active][-1])
    theta = cssv[r - 1] / r
    return np.maximum(v - theta, 0.0)


def project_to_density(a: np.ndarray, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> np.ndarray:
    """Frobenius-nearest density matrix: Hermitize, then clip the spectrum onto the simplex."""
    herm = 0.5 * (a + a.conj().T)
    eig = herm_eig(ComplexMatrix(herm), tol)
    weights = project_to_simplex(eig.eigenvalues)
    v = eig.eigenvectors.data
    rho = (v * weights) @ v.conj().T
    return 0.5 * (rho + rho.conj().T)


def _objective(bs: np.ndarray, cs: np.ndarray, rho: np.ndarray) -> Tuple[float, np.ndarray]:
    r = np.einsum('ij,kji->k', rho, bs) - cs
    return float(np.sum(np.abs(r) ** 2)), r


def _gradient(bs: np.ndarray, r: np.ndarray) -> np.ndarray:
    m = np.einsum('k,kij->ij', r.conj(), bs)
    return m + m.conj().T


def _warm_starts(bs: np.ndarray, tol: ToleranceConfig) -> List[np.ndarray]:
    """Pure states on the top eigenvector of each Hermitian part; these attain ||b_k|| when b_k >= 0."""
    starts = []
    for b in bs:
        eig = herm_eig(ComplexMatrix(0.5 * (b + b.conj().T)), tol)
        v = eig.top_eigenvector()
        starts.append(np.outer(v, v.conj()))
    return starts


def _random_pure(rng: np.random.Generator, d: int) -> np.ndarray:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


def _as_state(rho: np.ndarray) -> State:
    return State(ComplexMatrix(rho))


def _descend(
    bs: np.ndarray,
    cs: np.ndarray,
    rho: np.ndarray,
    step: float,
    tol: ToleranceConfig,
) -> Tuple[np.ndarray, float, int]:
    """Projected gradient from ``rho``; returns the best point, sqrt(F) there and the iteration count."""
    value, r = _objective(bs, cs, rho)
    best, best_value = rho, value
    for iteration in range(1, tol.max_iter + 1):
        if math.sqrt(best_value) <= tol.tol_feas:
            return best, math.sqrt(best_value), iteration - 1
        updated = project_to_density(rho - step * _gradient(bs, r), tol)
        moved = float(np.linalg.norm(updated - rho))
        rho = updated
        value, r = _objective(bs, cs, rho)
        if value < best_value:
            best, best_value = rho, value
        if moved <= tol.tol_eig:
            return best, math.sqrt(best_value), iteration
    return best, math.sqrt(best_value), tol.max_iter


def solve_state_feasibility(
    cs: ConstraintSet,
    d: int,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
) -> FeasibilityResult:
    """Search for a state rho on M_d with trace(rho b_k) = c_k for every k.

    Starts are tried in a fixed order: the top-eigenvector pure state of each
    b_k, the maximally mixed state, then ``restarts`` random pure states drawn
    from ``seed``. The result is deterministic for fixed inputs.

    Raises:
        InvalidParameters: when d < 1.
        DimensionMismatch: when some b_k is not d x d.
    """
    if d < 1:
        raise InvalidParameters(f"state dimension must be positive, got {d}")
    for k, target in enumerate(cs):
        if target.b.shape != (d, d):
            raise DimensionMismatch(f"constraint {k} has shape {target.b.shape}, expected ({d}, {d})")

    if cs.is_empty:
        return FeasibilityResult(FeasibilityStatus.FEASIBLE, State.maximally_mixed(d), 0.0, 0)

    excess = max(target.c - op_norm(target.b, tol) for target in cs)
    if excess > tol.tol_eq:
        logger.debug("infeasible by norm: excess %.3e", excess)
        return FeasibilityResult(FeasibilityStatus.INFEASIBLE_BY_NORM, None, excess, 0)

    bs, targets = cs.stacked()
    if d == 1:
        rho = np.ones((1, 1), dtype=np.complex128)
        residual = math.sqrt(_objective(bs, targets, rho)[0])
        if residual <= tol.tol_feas:
            return FeasibilityResult(FeasibilityStatus.FEASIBLE, _as_state(rho), residual, 0)
        return FeasibilityResult(FeasibilityStatus.RESIDUAL_ABOVE_TOL, None, residual, 0)

    step = 1.0 / (2.0 * max(float(np.sum(np.abs(bs) ** 2)), _EPS))
    rng = np.random.default_rng(seed)
    starts = _warm_starts(bs, tol) + [np.eye(d, dtype=np.complex128) / d]
    starts += [_random_pure(rng, d) for _ in range(restarts)]

    total = 0
    best_residual = math.inf
    for attempt, start in enumerate(starts):
        rho, residual, used = _descend(bs, targets, start, step, tol)
        total += used
        best_residual = min(best_residual, residual)
        if residual <= tol.tol_feas:
            logger.debug("feasible after start %d, %d iterations", attempt, total)
            return FeasibilityResult(FeasibilityStatus.FEASIBLE, _as_state(rho), residual, total)

    logger.debug("residual %.3e above tol_feas after %d starts", best_residual, len(starts))
    return FeasibilityResult(FeasibilityStatus.RESIDUAL_ABOVE_TOL, None, best_residual, total)


def check_state_against(cs: ConstraintSet, state: State) -> List[float]:
    """Residuals of ``state`` on every constraint, real and imaginary parts interleaved."""
    return cs.residuals(state.rho)


def state_axiom_defects(
    state: State,
    samples: Sequence[ComplexMatrix],
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> List[str]:
    """|phi(b)| <= ||b|| and Re phi(b* b) >= 0 on every sample matrix."""
    defects = []
    rho = state.rho.data
    for k, b in enumerate(samples):
        value = complex(np.einsum('ij,ji->', rho, b.data))
        if abs(value) > op_norm(b, tol) + tol.tol_eq:
            defects.append(f"|phi(b_{k})| exceeds ||b_{k}||")
        gram = b.data.conj().T @ b.data
        if complex(np.einsum('ij,ji->', rho, gram)).real < -tol.tol_eq:
            defects.append(f"phi(b_{k}* b_{k}) is negative")
    return defects
