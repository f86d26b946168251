"""The pre-Hilbert module X = M_{m x d}(C) over A = M_d(C).

The inner product is <x, y> = x* y, the right action is matrix multiplication
and the module norm is ||x|| = ||<x, x>||^(1/2). With d = 1 this is the
inner-product space C^m.
"""

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .algebra import (
    ComplexMatrix,
    MatrixLike,
    as_matrix,
    herm_eig,
    is_coisometry_multiple,
    op_norm,
)
from .errors import DimensionMismatch, NotCoisometryMultiple
from ..utils.config import DEFAULT_TOLERANCES, ToleranceConfig


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """Element of A = M_d(C)."""
    mat: ComplexMatrix

    def __post_init__(self):
        mat = as_matrix(self.mat)
        if not mat.is_square:
            raise DimensionMismatch(f"algebra elements are square, got {mat.shape}")
        object.__setattr__(self, 'mat', mat)

    @property
    def algebra_dim(self) -> int:
        return self.mat.rows

    @classmethod
    def identity(cls, d: int) -> 'AlgebraElement':
        return cls(ComplexMatrix.identity(d))

    @classmethod
    def scalar(cls, alpha: complex, d: int) -> 'AlgebraElement':
        return cls(ComplexMatrix.identity(d) * complex(alpha))

    def adjoint(self) -> 'AlgebraElement':
        return AlgebraElement(self.mat.adjoint())

    def norm(self, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
        return op_norm(self.mat, tol)

    def __add__(self, other: 'AlgebraElement') -> 'AlgebraElement':
        return AlgebraElement(self.mat + other.mat)

    def __sub__(self, other: 'AlgebraElement') -> 'AlgebraElement':
        return AlgebraElement(self.mat - other.mat)

    def __matmul__(self, other: 'AlgebraElement') -> 'AlgebraElement':
        return AlgebraElement(self.mat @ other.mat)

    def __mul__(self, scalar: complex) -> 'AlgebraElement':
        return AlgebraElement(self.mat * scalar)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.mat == other.mat

    def __hash__(self):
        return hash(self.mat)


@dataclass(frozen=True, eq=False)
class ModuleElement:
    """Element of X = M_{m x d}(C); ``algebra_dim`` must equal the column count."""
    mat: ComplexMatrix
    algebra_dim: int = 0

    def __post_init__(self):
        mat = as_matrix(self.mat)
        object.__setattr__(self, 'mat', mat)
        if self.algebra_dim == 0:
            object.__setattr__(self, 'algebra_dim', mat.cols)
        if mat.cols != self.algebra_dim:
            raise DimensionMismatch(
                f"module element has {mat.cols} columns but algebra_dim={self.algebra_dim}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[complex]]) -> 'ModuleElement':
        return cls(ComplexMatrix.from_rows(rows))

    @classmethod
    def column(cls, values: Iterable[complex]) -> 'ModuleElement':
        """An m-vector of the d = 1 module C^m."""
        return cls(ComplexMatrix(np.asarray(list(values), dtype=np.complex128).reshape(-1, 1)))

    @property
    def rows(self) -> int:
        return self.mat.rows

    def __add__(self, other: 'ModuleElement') -> 'ModuleElement':
        return ModuleElement(self.mat + other.mat)

    def __sub__(self, other: 'ModuleElement') -> 'ModuleElement':
        return ModuleElement(self.mat - other.mat)

    def __neg__(self) -> 'ModuleElement':
        return ModuleElement(-self.mat)

    def __mul__(self, scalar: complex) -> 'ModuleElement':
        return ModuleElement(self.mat * scalar)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModuleElement):
            return NotImplemented
        return self.mat == other.mat

    def __hash__(self):
        return hash(self.mat)


def _require_compatible(x: ModuleElement, y: ModuleElement):
    if x.mat.shape != y.mat.shape:
        raise DimensionMismatch(f"module elements of shapes {x.mat.shape} and {y.mat.shape}")


def inner_product(x: ModuleElement, y: ModuleElement) -> AlgebraElement:
    """<x, y> = x* y."""
    _require_compatible(x, y)
    return AlgebraElement(x.mat.adjoint() @ y.mat)


def right_action(x: ModuleElement, a: AlgebraElement) -> ModuleElement:
    """x . a as a matrix product."""
    if x.algebra_dim != a.algebra_dim:
        raise DimensionMismatch(
            f"cannot act with a {a.algebra_dim}x{a.algebra_dim} element on algebra_dim={x.algebra_dim}"
        )
    return ModuleElement(x.mat @ a.mat)


def module_norm(x: ModuleElement, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> float:
    """||x|| = ||<x, x>||^(1/2); <x, x> is PSD so its norm is its top eigenvalue."""
    gram = inner_product(x, x)
    top = herm_eig(gram.mat, tol).max_eigenvalue
    return math.sqrt(max(top, 0.0))


def module_sum(xs: Sequence[ModuleElement]) -> ModuleElement:
    if not xs:
        raise DimensionMismatch("cannot sum an empty family")
    total = xs[0].mat.data
    for x in xs[1:]:
        _require_compatible(xs[0], x)
        total = total + x.mat.data
    return ModuleElement(ComplexMatrix(total))


def is_zero(x: ModuleElement, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> bool:
    """Zero detection up to tol_eq; axiom (ii) is only decidable that way."""
    return module_norm(x, tol) <= tol.tol_eq


@dataclass(frozen=True)
class LemmaCheck:
    """Outcome of ||x a|| = ||x|| ||a|| for a coisometry multiple a."""
    lhs: float
    rhs: float
    holds: bool


def check_lemma_coisometry_norm(
    x: ModuleElement,
    a: AlgebraElement,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> LemmaCheck:
    """Check ||x a|| = ||x|| ||a||, and that x a = 0 forces x = 0 or a = 0.

    Raises:
        NotCoisometryMultiple: when ``a`` is not a scalar multiple of a coisometry.
    """
    a_norm = is_coisometry_multiple(a.mat, tol)
    if a_norm is None:
        raise NotCoisometryMultiple("a a* is not a scalar multiple of the identity")
    lhs = module_norm(right_action(x, a), tol)
    x_norm = module_norm(x, tol)
    rhs = x_norm * a_norm
    holds = abs(lhs - rhs) <= tol.tol_eq
    if lhs <= tol.tol_eq and not (x_norm <= tol.tol_eq or a_norm <= tol.tol_eq):
        holds = False
    return LemmaCheck(lhs=lhs, rhs=rhs, holds=holds)


def as_algebra(value: MatrixLike) -> AlgebraElement:
    if isinstance(value, AlgebraElement):
        return value
    return AlgebraElement(as_matrix(value))
