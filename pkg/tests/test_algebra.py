import math

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from src.core.algebra import (
    ComplexMatrix,
    State,
    adjoint,
    apply_state,
    density_matrix_defect,
    herm_eig,
    is_coisometry_multiple,
    is_hermitian,
    op_norm,
    psd_sqrt,
)
from src.core.errors import DimensionMismatch, NonFiniteEntries, NotHermitian, NotPSD


def random_hermitian(rng, d):
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (a + a.conj().T)


def test_adjoint_conjugates_and_transposes():
    assert adjoint([[1j]]) == ComplexMatrix([[-1j]])
    a = ComplexMatrix([[1, 2j], [3, 4 - 1j]])
    assert adjoint(a) == ComplexMatrix([[1, 3], [-2j, 4 + 1j]])


def test_adjoint_is_an_involution(rng):
    a = ComplexMatrix(rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4)))
    assert adjoint(adjoint(a)) == a


def test_matrix_rejects_non_finite_entries():
    with pytest.raises(NonFiniteEntries):
        ComplexMatrix([[1.0, np.nan]])


def test_from_entries_checks_length():
    with pytest.raises(DimensionMismatch):
        ComplexMatrix.from_entries(2, 2, [1, 2, 3])


def test_product_checks_shapes():
    with pytest.raises(DimensionMismatch):
        ComplexMatrix.identity(2) @ ComplexMatrix.identity(3)


def test_herm_eig_sorts_eigenvalues_ascending():
    eig = herm_eig(ComplexMatrix.diag([3, -1]))
    np.testing.assert_allclose(eig.eigenvalues, [-1, 3])
    np.testing.assert_allclose(np.abs(eig.eigenvectors.data), [[0, 1], [1, 0]])


def test_herm_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        herm_eig([[0, 1], [0, 0]])
    with pytest.raises(NotHermitian):
        herm_eig(ComplexMatrix.zeros(2, 3))


def test_herm_eig_phase_convention():
    eig = herm_eig([[2, 1j], [-1j, 2]])
    v = eig.eigenvectors.data
    for k in range(2):
        pivot = int(np.argmax(np.abs(v[:, k])))
        assert v[pivot, k].imag == 0.0
        assert v[pivot, k].real > 0.0


@pytest.mark.parametrize('d', [1, 2, 3, 5, 8])
def test_herm_eig_reconstructs_random_hermitian(rng, d):
    for _ in range(10):
        a = random_hermitian(rng, d)
        eig = herm_eig(a)
        v = eig.eigenvectors.data
        scale = max(1.0, np.linalg.norm(a))
        assert np.linalg.norm(eig.reconstruct().data - a) <= 1e-12 * scale * d
        assert np.linalg.norm(v.conj().T @ v - np.eye(d)) <= 1e-12 * d
        assert np.all(np.diff(eig.eigenvalues) >= 0)
        np.testing.assert_allclose(eig.eigenvalues, np.linalg.eigvalsh(a), atol=1e-10 * scale)


def test_herm_eig_is_deterministic(rng):
    a = random_hermitian(rng, 4)
    first, second = herm_eig(a), herm_eig(a)
    assert np.array_equal(first.eigenvalues, second.eigenvalues)
    assert first.eigenvectors == second.eigenvectors


def test_is_hermitian():
    assert is_hermitian([[1, 1j], [-1j, 2]])
    assert not is_hermitian([[1, 1j], [1j, 2]])
    assert not is_hermitian(ComplexMatrix.zeros(1, 2))


def test_op_norm_of_nilpotent():
    assert op_norm([[0, 2], [0, 0]]) == pytest.approx(2.0, abs=1e-12)


def test_op_norm_of_rectangular_column():
    assert op_norm([[3], [4]]) == pytest.approx(5.0, abs=1e-12)


def power_iteration_norm(a, iterations=500):
    """Largest singular value by power iteration on a* a."""
    gram = a.conj().T @ a
    v = np.ones(gram.shape[0], dtype=np.complex128)
    for _ in range(iterations):
        w = gram @ v
        if np.linalg.norm(w) == 0:
            return 0.0
        v = w / np.linalg.norm(w)
    return math.sqrt(abs(np.vdot(v, gram @ v)))


def test_op_norm_agrees_with_power_iteration(rng):
    for d in (2, 3, 4, 6):
        a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        assert op_norm(a) == pytest.approx(power_iteration_norm(a), rel=1e-6)
        assert op_norm(a) == pytest.approx(np.linalg.norm(a, 2), rel=1e-10)


def test_psd_sqrt_of_diagonal():
    root = psd_sqrt(ComplexMatrix.diag([4, 9]))
    np.testing.assert_allclose(root.data, np.diag([2, 3]), atol=1e-12)


def test_psd_sqrt_squares_back(rng):
    b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    a = b.conj().T @ b
    root = psd_sqrt(a).data
    np.testing.assert_allclose(root @ root, a, atol=1e-10)


def test_psd_sqrt_rejects_negative_spectrum():
    with pytest.raises(NotPSD):
        psd_sqrt(ComplexMatrix.diag([1, -1]))


def test_psd_sqrt_clamps_tiny_negative_eigenvalues():
    root = psd_sqrt(ComplexMatrix.diag([1, -1e-13]))
    np.testing.assert_allclose(root.data, np.diag([1, 0]), atol=1e-12)


def test_psd_sqrt_rejects_negative_eigenvalue_above_rounding():
    with pytest.raises(NotPSD):
        psd_sqrt(ComplexMatrix.diag([1, -1e-9]))


def test_psd_sqrt_rounding_floor_scales_with_norm():
    root = psd_sqrt(ComplexMatrix.diag([1e4, -1e-9]))
    np.testing.assert_allclose(root.data, np.diag([100, 0]), atol=1e-12)


@pytest.mark.parametrize('a, expected', [
    (ComplexMatrix.diag([1 - 1j, 1j - 1]), math.sqrt(2)),
    (ComplexMatrix.identity(3) * 2, 2.0),
    (ComplexMatrix.zeros(2, 2), 0.0),
    (ComplexMatrix([[0, 1], [1, 0]]), 1.0),
])
def test_is_coisometry_multiple_returns_norm(a, expected):
    assert is_coisometry_multiple(a) == pytest.approx(expected, abs=1e-12)


def test_is_coisometry_multiple_rejects():
    assert is_coisometry_multiple(ComplexMatrix.diag([1, 2])) is None
    assert is_coisometry_multiple([[0, 1], [0, 0]]) is None


def test_is_coisometry_multiple_uses_absolute_residual():
    near = ComplexMatrix([[100, 1e-13], [0, 100]])
    assert is_coisometry_multiple(near) == pytest.approx(100.0)
    skewed = ComplexMatrix([[100, 1e-10], [0, 100]])
    assert is_coisometry_multiple(skewed) is None


def test_apply_state_on_nilpotent_is_zero():
    assert apply_state(State.maximally_mixed(2), [[0, 2], [0, 0]]) == 0


def test_apply_state_is_trace_pairing(rng):
    state = State.pure([1, 1j])
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    assert apply_state(state, a) == pytest.approx(np.trace(state.rho.data @ a))


def test_apply_state_checks_dimensions():
    with pytest.raises(DimensionMismatch):
        apply_state(State.maximally_mixed(2), ComplexMatrix.identity(3))


@pytest.mark.parametrize('rho, fragment', [
    ([[1, 0], [0, 1]], 'trace'),
    ([[0.5, 0.5], [0, 0.5]], 'Hermitian'),
    ([[1.5, 0], [0, -0.5]], 'negative'),
    (ComplexMatrix.zeros(1, 2), 'square'),
])
def test_density_matrix_defect(rho, fragment):
    assert fragment in density_matrix_defect(rho)


def test_state_rejects_bad_density():
    with pytest.raises(NotPSD):
        State(ComplexMatrix.identity(2))
    assert density_matrix_defect(State.pure([1, 2, 3j]).rho) is None


finite = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False, allow_subnormal=False)


@seed(20240917)
@settings(max_examples=60, deadline=None)
@given(real=arrays(np.float64, (4, 4), elements=finite), imag=arrays(np.float64, (4, 4), elements=finite))
def test_herm_eig_property(real, imag):
    a = real + 1j * imag
    a = 0.5 * (a + a.conj().T)
    eig = herm_eig(a)
    scale = max(1.0, np.linalg.norm(a))
    assert np.linalg.norm(eig.reconstruct().data - a) <= 1e-11 * scale
    assert op_norm(a) == pytest.approx(max(abs(eig.eigenvalues[0]), abs(eig.eigenvalues[-1])), abs=1e-10 * scale)
