"""Families a_1..a_n whose members and differences are coisometry multiples.

Two realizations live here:

* norm-based families in M_d(C) (diagonal pair, scalar, reciprocal-norm) that
  feed instances of the generalized Dunkl-Williams bounds, and
* the truncated unilateral-shift model of partial isometries v_j with
  v_j v_j* = e and v_j* v_j = p_j. In M_d a coisometry is unitary, so n >= 2
  mutually orthogonal halving projections cannot exist; the shift model is
  therefore checked exactly on basis vectors and never mixed into instances.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import ComplexMatrix, is_coisometry_multiple
from .errors import InvalidParameters, ZeroScalar
from .module_space import AlgebraElement, ModuleElement, module_norm
from ..utils.config import DEFAULT_TOLERANCES, ToleranceConfig


class FamilyTag(Enum):
    """How a family was constructed; the value is the serialized tag."""
    DIAGONAL_PAIR = 'diagpair'
    SCALAR = 'scalar'
    RECIPROCAL_NORM = 'recipnorm'
    SHIFT = 'shift'

    @classmethod
    def parse(cls, text: str) -> 'FamilyTag':
        try:
            return cls(text)
        except ValueError:
            raise InvalidParameters(f"unknown family tag {text!r}") from None


@dataclass(frozen=True)
class CoisometryFamily:
    """Algebra elements a_j with every a_j and a_j - a_i a coisometry multiple."""
    elems: Tuple[AlgebraElement, ...]
    construction: FamilyTag

    def __len__(self) -> int:
        return len(self.elems)

    def __iter__(self):
        return iter(self.elems)

    def __getitem__(self, index: int) -> AlgebraElement:
        return self.elems[index]

    @property
    def algebra_dim(self) -> int:
        return self.elems[0].algebra_dim

    def is_nondegenerate(self, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> bool:
        """True when some pair a_i != a_j, as the equality characterizations need."""
        return any(
            (self.elems[j] - self.elems[i]).mat.frobenius_norm() > tol.tol_eq
            for i in range(len(self.elems))
            for j in range(i + 1, len(self.elems))
        )


def family_defects(elems: Sequence[AlgebraElement], tol: ToleranceConfig = DEFAULT_TOLERANCES) -> List[str]:
    """List every member or difference that is not a coisometry multiple."""
    defects = []
    for j, a in enumerate(elems):
        if is_coisometry_multiple(a.mat, tol) is None:
            defects.append(f"a_{j} is not a coisometry multiple")
    for i in range(len(elems)):
        for j in range(i + 1, len(elems)):
            if is_coisometry_multiple((elems[j] - elems[i]).mat, tol) is None:
                defects.append(f"a_{j} - a_{i} is not a coisometry multiple")
    return defects


def _validated(elems: Sequence[AlgebraElement], tag: FamilyTag, tol: ToleranceConfig) -> CoisometryFamily:
    defects = family_defects(elems, tol)
    if defects:
        raise InvalidParameters('; '.join(defects))
    return CoisometryFamily(elems=tuple(elems), construction=tag)


def make_diagonal_pair(
    alpha: complex,
    beta: complex,
    d: int = 2,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> CoisometryFamily:
    """{diag(alpha, beta, ...), diag(beta, alpha, ...)} in M_d.

    Requires |alpha| = |beta| and alpha^2 != beta^2. d = 2 is the M_2 pair;
    larger d alternates the entries and d = 1 leaves the scalars alpha, beta.
    """
    alpha, beta = complex(alpha), complex(beta)
    if d < 1:
        raise InvalidParameters(f"d must be positive, got {d}")
    if abs(abs(alpha) - abs(beta)) > tol.tol_eq:
        raise InvalidParameters(f"|alpha| = {abs(alpha):.6g} differs from |beta| = {abs(beta):.6g}")
    if abs(alpha * alpha - beta * beta) <= tol.tol_eq:
        raise InvalidParameters("alpha^2 and beta^2 coincide")
    first = [alpha if k % 2 == 0 else beta for k in range(d)]
    second = [beta if k % 2 == 0 else alpha for k in range(d)]
    elems = (AlgebraElement(ComplexMatrix.diag(first)), AlgebraElement(ComplexMatrix.diag(second)))
    return _validated(elems, FamilyTag.DIAGONAL_PAIR, tol)


def make_scalar_family(
    alphas: Iterable[complex],
    d: int,
    unitary: Optional[ComplexMatrix] = None,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
    tag: FamilyTag = FamilyTag.SCALAR,
) -> CoisometryFamily:
    """{alpha_j u}; u defaults to the unit e, giving a_j = alpha_j e."""
    alphas = [complex(alpha) for alpha in alphas]
    if not alphas:
        raise InvalidParameters("a family needs at least one coefficient")
    for j, alpha in enumerate(alphas):
        if abs(alpha) <= tol.tol_eq:
            raise ZeroScalar(f"alpha_{j} is zero")
    base = ComplexMatrix.identity(d) if unitary is None else unitary
    if base.shape != (d, d):
        raise InvalidParameters(f"unitary factor has shape {base.shape}, expected ({d}, {d})")
    elems = tuple(AlgebraElement(base * alpha) for alpha in alphas)
    return _validated(elems, tag, tol)


def make_reciprocal_norm_family(
    xs: Sequence[ModuleElement],
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
    norms: Optional[Sequence[float]] = None,
) -> CoisometryFamily:
    """a_j = (1 / ||x_j||) e, the Pecaric-Rajic specialization.

    ``norms`` are the precomputed ||x_j|| when the caller already has them.
    """
    if norms is None:
        norms = [module_norm(x, tol) for x in xs]
    for j, norm in enumerate(norms):
        if norm <= tol.tol_eq:
            raise ZeroScalar(f"x_{j} is zero, 1/||x_{j}|| is undefined")
    return make_scalar_family(
        [1.0 / norm for norm in norms], xs[0].algebra_dim, tol=tol, tag=FamilyTag.RECIPROCAL_NORM
    )


def repeat_family(family: CoisometryFamily, n: int) -> CoisometryFamily:
    """Cycle the members to length n; differences stay 0 or pairwise differences."""
    elems = tuple(family.elems[j % len(family.elems)] for j in range(n))
    return CoisometryFamily(elems=elems, construction=family.construction)


# ------------------------------------------------------------------ shift model

SparseVector = Dict[int, complex]


@dataclass(frozen=True)
class ShiftOperator:
    """Partial isometry given by a weighted partial injection on {0..N-1}.

    ``index_map[source] = (target, weight)`` means e_source -> weight * e_target;
    unmapped basis vectors go to zero.
    """
    index_map: Dict[int, Tuple[int, complex]]
    truncation: int
    label: str = ''

    def __post_init__(self):
        targets = [target for target, _ in self.index_map.values()]
        if len(set(targets)) != len(targets):
            raise InvalidParameters(f"{self.label or 'shift'} map is not injective")
        for source, (target, weight) in self.index_map.items():
            if not (0 <= source < self.truncation and 0 <= target < self.truncation):
                raise InvalidParameters(f"index {source}->{target} outside 0..{self.truncation - 1}")
            if abs(weight) != 1:
                raise InvalidParameters(f"weight {weight} on {source} does not have modulus 1")

    def apply(self, vector: SparseVector) -> SparseVector:
        out: SparseVector = {}
        for index, coeff in vector.items():
            image = self.index_map.get(index)
            if image is None:
                continue
            target, weight = image
            out[target] = out.get(target, 0) + weight * coeff
        return _prune(out)

    def adjoint(self) -> 'ShiftOperator':
        inverse = {
            target: (source, complex(weight).conjugate())
            for source, (target, weight) in self.index_map.items()
        }
        return ShiftOperator(inverse, self.truncation, f"{self.label}*")

    def apply_adjoint(self, vector: SparseVector) -> SparseVector:
        return self.adjoint().apply(vector)


def _prune(vector: SparseVector) -> SparseVector:
    return {index: coeff for index, coeff in vector.items() if coeff != 0}


def basis(index: int) -> SparseVector:
    return {index: 1}


def vector_add(a: SparseVector, b: SparseVector, scale: complex = 1) -> SparseVector:
    out = dict(a)
    for index, coeff in b.items():
        out[index] = out.get(index, 0) + scale * coeff
    return _prune(out)


def make_shift_family(n: int, truncation: int) -> List[ShiftOperator]:
    """v_j : e_{n k + j} -> e_k, the adjoints of the isometries e_k -> e_{n k + j}."""
    if n < 2:
        raise InvalidParameters(f"the shift family needs n >= 2, got {n}")
    if truncation < n * n:
        raise InvalidParameters(f"truncation N={truncation} is below n^2={n * n}")
    family = []
    for j in range(n):
        index_map = {n * k + j: (k, 1) for k in range(truncation) if n * k + j < truncation}
        family.append(ShiftOperator(index_map, truncation, f"v_{j}"))
    return family


def corrupt_shift(op: ShiftOperator, offset: int = 1) -> ShiftOperator:
    """Negative control: move every target of ``op`` by ``offset``."""
    index_map = {
        source: (target + offset, weight)
        for source, (target, weight) in op.index_map.items()
        if 0 <= target + offset < op.truncation
    }
    return ShiftOperator(index_map, op.truncation, f"{op.label}~")


def shift_as_dense(op: ShiftOperator) -> np.ndarray:
    """Dense N x N matrix of the operator; for inspection only."""
    dense = np.zeros((op.truncation, op.truncation), dtype=np.complex128)
    for source, (target, weight) in op.index_map.items():
        dense[target, source] = weight
    return dense
