from dataclasses import replace

import numpy as np
import pytest

from src.core.errors import WrongDimension
from src.engine.feasibility import ConstraintSet, FeasibilityStatus
from src.forge.generator import random_constraint_set
from src.forge.oracles import (
    GRID_STEP,
    OracleComparison,
    OracleResult,
    bloch_grid,
    bloch_grid_oracle,
    compare_with_solver,
    residue_projection,
)
from src.utils.config import ToleranceConfig

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def test_bloch_grid_stays_in_the_ball():
    points = bloch_grid(0.25)
    assert np.all(np.sum(points ** 2, axis=1) <= 1.0 + 1e-12)
    assert any(np.allclose(p, [0, 0, 1]) for p in points)


def test_pauli_expectation_one_is_feasible():
    result = bloch_grid_oracle(ConstraintSet.from_pairs([(SIGMA_Z, 1)]))
    assert result.feasible
    assert result.margin == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(result.witness, [0, 0, 1], atol=1e-12)


def test_expectation_beyond_norm_is_infeasible():
    result = bloch_grid_oracle(ConstraintSet.from_pairs([(SIGMA_Z, 1.5)]))
    assert not result.feasible
    assert result.margin == pytest.approx(0.5, abs=1e-12)


def test_two_pauli_expectations_at_one_are_infeasible():
    result = bloch_grid_oracle(ConstraintSet.from_pairs([(SIGMA_Z, 1), (SIGMA_X, 1)]))
    assert not result.feasible
    assert result.margin == pytest.approx(1 - 1 / np.sqrt(2), abs=2 * GRID_STEP)
    assert result.lipschitz == pytest.approx(2.0)


def test_empty_set_is_feasible():
    assert bloch_grid_oracle(ConstraintSet()).feasible


def test_oracle_rejects_other_dimensions():
    with pytest.raises(WrongDimension):
        bloch_grid_oracle(ConstraintSet.from_pairs([(np.eye(3), 1)]))


@pytest.mark.slow
@pytest.mark.parametrize('seed', range(200))
def test_solver_agrees_with_grid_oracle_outside_the_band(seed):
    tol = ToleranceConfig(max_iter=2000)
    comparison = compare_with_solver(random_constraint_set(seed, 1 + seed % 3), tol, seed=seed)
    if comparison.solver is FeasibilityStatus.FEASIBLE:
        assert comparison.oracle.feasible
    assert comparison.ok


def test_comparison_on_reachable_target():
    comparison = compare_with_solver(ConstraintSet.from_pairs([(SIGMA_Z, 0.5)]), step=0.1)
    assert comparison.solver is FeasibilityStatus.FEASIBLE
    assert comparison.oracle.feasible
    assert comparison.agrees and comparison.ok
    assert comparison.band == pytest.approx(2 * 1.0 * 0.1)


def test_comparison_on_target_beyond_the_norm():
    comparison = compare_with_solver(ConstraintSet.from_pairs([(SIGMA_Z, 1.5)]), step=0.1)
    assert comparison.solver is FeasibilityStatus.INFEASIBLE_BY_NORM
    assert not comparison.oracle.feasible
    assert not comparison.in_band
    assert comparison.ok


def test_disagreement_outside_the_band_is_flagged():
    oracle = OracleResult(feasible=False, margin=0.5, witness=(0.0, 0.0, 1.0), lipschitz=1.0)
    comparison = OracleComparison(oracle, FeasibilityStatus.FEASIBLE, step=0.02, tol_feas=1e-7)
    assert not comparison.in_band
    assert not comparison.ok
    inside = OracleComparison(replace(oracle, margin=0.01), FeasibilityStatus.FEASIBLE, step=0.02, tol_feas=1e-7)
    assert inside.in_band and inside.ok


def test_random_constraint_sets_are_seeded_and_hermitian():
    first, again = random_constraint_set(3, 2), random_constraint_set(3, 2)
    assert [t.c for t in first] == [t.c for t in again]
    for target in first:
        np.testing.assert_allclose(target.b.data, target.b.data.conj().T)
        assert -1.5 < target.c < 1.5


def test_residue_projection():
    vector = {0: 1, 1: 2, 2: 3, 5: 4}
    assert residue_projection(2, 1, vector) == {1: 2, 5: 4}
    assert residue_projection(3, 2, vector) == {2: 3, 5: 4}
