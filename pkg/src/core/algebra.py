"""Dense complex matrix arithmetic and C*-algebra predicates on M_d(C).

Every algebra element, module element and density matrix in the laboratory is
carried by :class:`ComplexMatrix`, an immutable wrapper around a complex128
numpy array. The Hermitian eigensolver is a cyclic Jacobi iteration so that
results are deterministic for a fixed input (fixed sweep order and a fixed
eigenvector phase convention).
"""

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    NoConvergence,
    NonFiniteEntries,
    NotHermitian,
    NotPSD,
)
from ..utils.config import DEFAULT_TOLERANCES, ToleranceConfig

# Largest matrix size handed to the Jacobi eigensolver
MAX_DIM = 64

_EPS = np.finfo(np.float64).eps


@dataclass(frozen=True, eq=False)
class ComplexMatrix:
    """Dense rows x cols complex matrix; immutable after construction."""
    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.complex128, copy=True)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        elif arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionMismatch(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteEntries("matrix entries must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, 'data', arr)

    # ---------------------------------------------------------------- builders

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[complex]]) -> 'ComplexMatrix':
        return cls(np.asarray(rows, dtype=np.complex128))

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: Sequence[complex]) -> 'ComplexMatrix':
        """Build from a row-major entry list; its length must equal rows * cols."""
        if rows < 1 or cols < 1 or len(entries) != rows * cols:
            raise DimensionMismatch(
                f"{len(entries)} entries cannot fill a {rows}x{cols} matrix"
            )
        return cls(np.asarray(entries, dtype=np.complex128).reshape(rows, cols))

    @classmethod
    def identity(cls, d: int) -> 'ComplexMatrix':
        return cls(np.eye(d, dtype=np.complex128))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> 'ComplexMatrix':
        return cls(np.zeros((rows, cols), dtype=np.complex128))

    @classmethod
    def diag(cls, values: Iterable[complex]) -> 'ComplexMatrix':
        return cls(np.diag(np.asarray(list(values), dtype=np.complex128)))

    # -------------------------------------------------------------- accessors

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    @property
    def entries(self) -> tuple:
        """Row-major entries."""
        return tuple(complex(z) for z in self.data.ravel())

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def adjoint(self) -> 'ComplexMatrix':
        return ComplexMatrix(self.data.conj().T)

    def trace(self) -> complex:
        if not self.is_square:
            raise DimensionMismatch(f"trace needs a square matrix, got {self.shape}")
        return complex(np.trace(self.data))

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.data))

    # ------------------------------------------------------------- arithmetic

    def __matmul__(self, other: 'ComplexMatrix') -> 'ComplexMatrix':
        other = as_matrix(other)
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        return ComplexMatrix(self.data @ other.data)

    def __add__(self, other: 'ComplexMatrix') -> 'ComplexMatrix':
        other = as_matrix(other)
        _require_same_shape(self, other)
        return ComplexMatrix(self.data + other.data)

    def __sub__(self, other: 'ComplexMatrix') -> 'ComplexMatrix':
        other = as_matrix(other)
        _require_same_shape(self, other)
        return ComplexMatrix(self.data - other.data)

    def __neg__(self) -> 'ComplexMatrix':
        return ComplexMatrix(-self.data)

    def __mul__(self, scalar: complex) -> 'ComplexMatrix':
        if not np.isscalar(scalar):
            return NotImplemented
        return ComplexMatrix(self.data * complex(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex) -> 'ComplexMatrix':
        if not np.isscalar(scalar):
            return NotImplemented
        return ComplexMatrix(self.data / complex(scalar))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ComplexMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    def __hash__(self):
        return hash((self.shape, self.data.tobytes()))

    def __repr__(self) -> str:
        return f"ComplexMatrix({self.rows}x{self.cols}, {np.array2string(self.data, precision=6)})"


MatrixLike = Union[ComplexMatrix, np.ndarray, Sequence[Sequence[complex]], complex]


def as_matrix(value: MatrixLike) -> ComplexMatrix:
    """Coerce arrays, nested lists and scalars into a ComplexMatrix."""
    if isinstance(value, ComplexMatrix):
        return value
    if hasattr(value, 'mat') and isinstance(getattr(value, 'mat'), ComplexMatrix):
        return value.mat
    return ComplexMatrix(np.asarray(value, dtype=np.complex128))


def _require_same_shape(a: ComplexMatrix, b: ComplexMatrix):
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape {a.shape} does not match {b.shape}")


def adjoint(a: MatrixLike) -> ComplexMatrix:
    """Conjugate transpose; adjoint(adjoint(a)) == a exactly."""
    return as_matrix(a).adjoint()


# ------------------------------------------------------------------ eigensolver

@dataclass(frozen=True, eq=False)
class HermEig:
    """Eigen-decomposition A = V diag(eigenvalues) V* of a Hermitian matrix."""
    eigenvalues: np.ndarray
    eigenvectors: ComplexMatrix

    def reconstruct(self) -> ComplexMatrix:
        v = self.eigenvectors.data
        return ComplexMatrix((v * self.eigenvalues) @ v.conj().T)

    @property
    def max_eigenvalue(self) -> float:
        return float(self.eigenvalues[-1])

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues[0])

    def top_eigenvector(self) -> np.ndarray:
        return self.eigenvectors.data[:, -1].copy()


def is_hermitian(a: MatrixLike, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> bool:
    mat = as_matrix(a)
    if not mat.is_square:
        return False
    scale = max(1.0, mat.frobenius_norm())
    return float(np.linalg.norm(mat.data - mat.data.conj().T)) <= tol.tol_eig * scale


def _jacobi_rotation(work: np.ndarray, vecs: np.ndarray, p: int, q: int, mod: float):
    """Annihilate work[p, q] with a complex Jacobi rotation, in place."""
    phase = work[p, q] / mod
    theta = (work[q, q].real - work[p, p].real) / (2.0 * mod)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    rot = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]], dtype=np.complex128)

    idx = [p, q]
    work[:, idx] = work[:, idx] @ rot
    work[idx, :] = rot.conj().T @ work[idx, :]
    work[p, q] = 0.0
    work[q, p] = 0.0
    work[p, p] = work[p, p].real
    work[q, q] = work[q, q].real
    vecs[:, idx] = vecs[:, idx] @ rot


def herm_eig(a: MatrixLike, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> HermEig:
    """Cyclic Jacobi eigensolver for Hermitian matrices.

    Eigenvalues come back ascending. Each eigenvector is rotated so that its
    largest-modulus component (first one on ties) is real and nonnegative.

    Raises:
        NotHermitian: when ``a`` is not square and Hermitian within tol_eig.
        NoConvergence: when ``tol.max_iter`` sweeps do not diagonalize ``a``.
    """
    mat = as_matrix(a)
    if not mat.is_square:
        raise NotHermitian(f"eigen-decomposition needs a square matrix, got {mat.shape}")
    n = mat.rows
    if n > MAX_DIM:
        raise DimensionMismatch(f"eigensolver is capped at d <= {MAX_DIM}, got {n}")
    if not is_hermitian(mat, tol):
        raise NotHermitian("matrix is not Hermitian within tol_eig")

    work = 0.5 * (mat.data + mat.data.conj().T)
    vecs = np.eye(n, dtype=np.complex128)
    # Off-diagonal entries below this floor contribute far less than tol_eig
    # to the reconstruction residual.
    floor = 1e-3 * tol.tol_eig * float(np.linalg.norm(work))

    for _sweep in range(tol.max_iter):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                mod = abs(work[p, q])
                if mod <= floor or mod <= _EPS * math.sqrt(abs(work[p, p].real * work[q, q].real)):
                    continue
                _jacobi_rotation(work, vecs, p, q, mod)
                rotated = True
        if not rotated:
            break
    else:
        raise NoConvergence(f"Jacobi iteration did not converge in {tol.max_iter} sweeps")

    values = np.real(np.diag(work)).copy()
    order = np.argsort(values, kind='stable')
    values = values[order]
    vecs = vecs[:, order]

    for k in range(n):
        column = vecs[:, k]
        pivot = int(np.argmax(np.abs(column)))
        modulus = abs(column[pivot])
        if modulus > 0.0:
            vecs[:, k] = column * (column[pivot].conjugate() / modulus)
            vecs[pivot, k] = modulus

    values.setflags(write=False)
    return HermEig(eigenvalues=values, eigenvectors=ComplexMatrix(vecs))


def op_norm(a: MatrixLike, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
    """Operator norm: sqrt of the largest eigenvalue of a* a."""
    mat = as_matrix(a)
    gram = mat.data.conj().T @ mat.data
    top = herm_eig(ComplexMatrix(gram), tol).max_eigenvalue
    return math.sqrt(max(top, 0.0))


def psd_sqrt(a: MatrixLike, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> ComplexMatrix:
    """Positive square root of a positive semidefinite matrix.

    Eigenvalues down to -tol_eig * max(1, ||a||) are rounding and clamped to
    zero; anything lower raises. The floor never goes below -tol_feas.
    """
    eig = herm_eig(a, tol)
    scale = max(1.0, float(np.max(np.abs(eig.eigenvalues))))
    floor = min(tol.tol_eig * scale, tol.tol_feas)
    if eig.min_eigenvalue < -floor:
        raise NotPSD(f"minimum eigenvalue {eig.min_eigenvalue:.3e} is below -{floor:.1e}")
    roots = np.sqrt(np.clip(eig.eigenvalues, 0.0, None))
    v = eig.eigenvectors.data
    b = (v * roots) @ v.conj().T
    return ComplexMatrix(0.5 * (b + b.conj().T))


def is_coisometry_multiple(a: MatrixLike, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> Optional[float]:
    """Return ||a|| when a a* = lambda e, otherwise None.

    lambda is forced to trace(a a*) / d if the relation holds, so only the
    residual ||a a* - lambda e||_F has to be tested against the absolute tol_eq.
    """
    mat = as_matrix(a)
    if not mat.is_square:
        return None
    gram = mat.data @ mat.data.conj().T
    lam = float(np.trace(gram).real) / mat.rows
    residual = float(np.linalg.norm(gram - lam * np.eye(mat.rows)))
    if residual > tol.tol_eq:
        return None
    return math.sqrt(max(lam, 0.0))


# ----------------------------------------------------------------------- states

@dataclass(frozen=True, eq=False)
class State:
    """Density matrix rho representing the state phi(a) = trace(rho a)."""
    rho: ComplexMatrix

    def __post_init__(self):
        rho = as_matrix(self.rho)
        object.__setattr__(self, 'rho', rho)
        problem = density_matrix_defect(rho)
        if problem is not None:
            raise NotPSD(problem)

    @property
    def dim(self) -> int:
        return self.rho.rows

    @classmethod
    def maximally_mixed(cls, d: int) -> 'State':
        return cls(ComplexMatrix(np.eye(d, dtype=np.complex128) / d))

    @classmethod
    def pure(cls, vector: Sequence[complex]) -> 'State':
        v = np.asarray(vector, dtype=np.complex128).ravel()
        v = v / np.linalg.norm(v)
        return cls(ComplexMatrix(np.outer(v, v.conj())))


def density_matrix_defect(rho: MatrixLike, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> Optional[str]:
    """Describe why ``rho`` is not a density matrix, or return None."""
    mat = as_matrix(rho)
    if not mat.is_square:
        return f"density matrix must be square, got {mat.shape}"
    if not is_hermitian(mat, tol):
        return "density matrix is not Hermitian within tol_eig"
    trace = mat.trace()
    if abs(trace - 1.0) > tol.tol_eig * max(1, mat.rows):
        return f"density matrix trace {trace.real:.15g} differs from 1"
    lowest = herm_eig(mat, tol).min_eigenvalue
    if lowest < -tol.tol_eig:
        return f"density matrix has negative eigenvalue {lowest:.3e}"
    return None


def apply_state(state: Union[State, MatrixLike], a: MatrixLike) -> complex:
    """phi(a) = trace(rho a)."""
    rho = state.rho if isinstance(state, State) else as_matrix(state)
    mat = as_matrix(a)
    if rho.shape != mat.shape:
        raise DimensionMismatch(f"state of size {rho.shape} cannot act on {mat.shape}")
    return complex(np.einsum('ij,ji->', rho.data, mat.data))
