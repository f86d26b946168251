"""Brute-force oracles independent of the solver and of the coisometry factories."""

import logging
from dataclasses import dataclass, field
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from ..core.algebra import op_norm
from ..core.coisometry import ShiftOperator, SparseVector, basis, vector_add
from ..core.errors import WrongDimension
from ..engine.feasibility import DEFAULT_RESTARTS, ConstraintSet, FeasibilityStatus, solve_state_feasibility
from ..utils.config import DEFAULT_TOLERANCES, ToleranceConfig

logger = logging.getLogger(__name__)

GRID_STEP = 0.02
_CHUNK = 65536

_PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=np.complex128,
)


@dataclass(frozen=True)
class OracleResult:
    feasible: bool
    margin: float
    witness: Tuple[float, float, float]
    lipschitz: float = 0.0

    def band(self, step: float = GRID_STEP) -> float:
        """Width of the grid-resolution band around tol_feas."""
        return 2.0 * self.lipschitz * step


def bloch_grid(step: float = GRID_STEP) -> np.ndarray:
    """Grid points (x, y, z) with spacing ``step`` inside the unit ball, as a (P, 3) array."""
    count = int(round(2.0 / step)) + 1
    axis = np.linspace(-1.0, 1.0, count)
    x, y, z = np.meshgrid(axis, axis, axis, indexing='ij')
    points = np.stack([x.ravel(), y.ravel(), z.ravel()], axis=1)
    return points[np.sum(points ** 2, axis=1) <= 1.0 + 1e-12]


def _chunks(points: np.ndarray, size: int = _CHUNK) -> Iterator[np.ndarray]:
    for start in range(0, len(points), size):
        yield points[start:start + size]


def bloch_grid_oracle(
    cs: ConstraintSet,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
    step: float = GRID_STEP,
) -> OracleResult:
    """Enumerate rho = (I + x s1 + y s2 + z s3) / 2 over the Bloch-ball grid.

    Feasible iff the best grid point has max residual <= tol_feas + L * step,
    with L = sum_k ||b_k||. ``margin`` is that best residual.

    Raises:
        WrongDimension: when some b_k is not 2 x 2.
    """
    for k, target in enumerate(cs):
        if target.b.shape != (2, 2):
            raise WrongDimension(f"the Bloch oracle needs 2x2 constraints, constraint {k} is {target.b.shape}")
    if cs.is_empty:
        return OracleResult(True, 0.0, (0.0, 0.0, 0.0), 0.0)

    bs, cs_values = cs.stacked()
    # trace(rho b) = (tr b + x tr(s1 b) + y tr(s2 b) + z tr(s3 b)) / 2
    offsets = np.trace(bs, axis1=1, axis2=2) / 2.0
    slopes = np.einsum('pij,kji->kp', _PAULI, bs) / 2.0
    lipschitz = float(sum(op_norm(target.b, tol) for target in cs))

    best = np.inf
    witness = (0.0, 0.0, 0.0)
    for chunk in _chunks(bloch_grid(step)):
        values = offsets[:, None] + slopes @ chunk.T
        residual = np.maximum(np.abs(values.real - cs_values[:, None]), np.abs(values.imag)).max(axis=0)
        index = int(np.argmin(residual))
        if residual[index] < best:
            best = float(residual[index])
            witness = tuple(float(v) for v in chunk[index])

    feasible = best <= tol.tol_feas + lipschitz * step
    logger.debug("bloch oracle: margin=%.3e L=%.3f feasible=%s", best, lipschitz, feasible)
    return OracleResult(feasible, best, witness, lipschitz)


@dataclass(frozen=True)
class OracleComparison:
    """Solver classification next to the grid oracle's on one constraint set."""
    oracle: OracleResult
    solver: FeasibilityStatus
    step: float
    tol_feas: float
    iterations: int = 0

    @property
    def band(self) -> float:
        return self.oracle.band(self.step)

    @property
    def in_band(self) -> bool:
        """The margin is too close to tol_feas for the grid to decide."""
        return abs(self.oracle.margin - self.tol_feas) <= self.band

    @property
    def agrees(self) -> bool:
        return (self.solver is FeasibilityStatus.FEASIBLE) == self.oracle.feasible

    @property
    def ok(self) -> bool:
        return self.agrees or self.in_band


def compare_with_solver(
    cs: ConstraintSet,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
    step: float = GRID_STEP,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
) -> OracleComparison:
    """Run the state solver and the Bloch grid oracle on the same 2 x 2 constraint set."""
    oracle = bloch_grid_oracle(cs, tol, step)
    result = solve_state_feasibility(cs, 2, tol, restarts, seed)
    comparison = OracleComparison(
        oracle=oracle, solver=result.status, step=step, tol_feas=tol.tol_feas, iterations=result.iterations
    )
    if not comparison.ok:
        logger.warning(
            "solver says %s, oracle margin %.3e outside band %.3e", result.status.value, oracle.margin, comparison.band
        )
    return comparison


# ------------------------------------------------------------------ shift model

@dataclass
class ShiftCheckReport:
    n: int
    truncation: int
    window: int
    checked: int = 0
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def residue_projection(n: int, j: int, vector: SparseVector) -> SparseVector:
    """p_j as the projection onto span{e_s : s = j mod n}."""
    return {index: coeff for index, coeff in vector.items() if index % n == j}


def exhaustive_index_check(ops: Sequence[ShiftOperator], truncation: int) -> ShiftCheckReport:
    """Verify the partial-isometry identities on every basis vector of the window.

    With W = N // n the target-side identities v_j v_j* = e, v_j v_k* = 0 and
    (v_j - v_k)(v_j - v_k)* = 2e are checked on e_0..e_{W-1}; the source-side
    identities v_j* v_j = p_j and p_j p_k = 0 on e_0..e_{nW-1}. Arithmetic is
    exact on integer indices and unit weights.
    """
    n = len(ops)
    window = truncation // n if n else 0
    report = ShiftCheckReport(n=n, truncation=truncation, window=window)

    def fail(message: str):
        report.violations.append(message)

    for k in range(window):
        e = basis(k)
        for j, v in enumerate(ops):
            report.checked += 1
            if v.apply(v.apply_adjoint(e)) != e:
                fail(f"{v.label} {v.label}* e_{k} != e_{k}")
            for i, w in enumerate(ops):
                if i == j:
                    continue
                report.checked += 2
                if v.apply(w.apply_adjoint(e)):
                    fail(f"{v.label} {w.label}* e_{k} != 0")
                diff_adjoint = vector_add(v.apply_adjoint(e), w.apply_adjoint(e), scale=-1)
                image = vector_add(v.apply(diff_adjoint), w.apply(diff_adjoint), scale=-1)
                if image != {k: 2}:
                    fail(f"({v.label} - {w.label})({v.label} - {w.label})* e_{k} != 2 e_{k}")

    for s in range(n * window):
        e = basis(s)
        projections = [v.apply_adjoint(v.apply(e)) for v in ops]
        for j, image in enumerate(projections):
            report.checked += 1
            if image != residue_projection(n, j, e):
                fail(f"{ops[j].label}* {ops[j].label} e_{s} differs from p_{j} e_{s}")
            for i, v in enumerate(ops):
                if i == j:
                    continue
                report.checked += 1
                if v.apply_adjoint(v.apply(image)):
                    fail(f"p_{i} p_{j} e_{s} != 0")

    if report.violations:
        logger.warning("%d shift identity violations (n=%d, N=%d)", len(report.violations), n, truncation)
    return report
