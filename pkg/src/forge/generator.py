"""Seeded instance generators.

Every instance component draws from its own PCG64 stream, derived from the
spec's seed through ``SeedSequence(seed, spawn_key=(stream,))``, so the module
elements of an instance do not change when the coefficient family does.
"""

import logging
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import List, Optional, Sequence

import numpy as np

from ..core.algebra import MAX_DIM, ComplexMatrix
from ..core.coisometry import (
    CoisometryFamily,
    FamilyTag,
    make_diagonal_pair,
    make_reciprocal_norm_family,
    make_scalar_family,
    repeat_family,
)
from ..core.errors import InvalidSpec
from ..core.module_space import ModuleElement, module_norm, module_sum
from ..engine.feasibility import ConstraintSet
from ..engine.inequalities import Instance, validate_instance
from ..utils.config import DEFAULT_TOLERANCES, ToleranceConfig

logger = logging.getLogger(__name__)

# Random module elements below this norm are redrawn
MIN_NORM = 0.05
# Random coefficient moduli and positive multipliers are drawn from this range
SCALE_RANGE = (0.5, 2.0)
# Diagonal pairs with |alpha^2 - beta^2| at or below this are redrawn
PAIR_SEPARATION = 1e-3

_MAX_REDRAWS = 1000


class Stream(IntEnum):
    XS = 0
    FAMILY = 1
    NOISE = 2


class ForgeKind(Enum):
    RANDOM = 'random'
    EQUALITY = 'equality'
    NEAR_EQUALITY = 'near'
    SUM_ZERO = 'sumzero'

    @classmethod
    def parse(cls, text: str) -> 'ForgeKind':
        try:
            return cls(text)
        except ValueError:
            raise InvalidSpec(f"unknown instance kind {text!r}") from None


@dataclass(frozen=True)
class ForgeSpec:
    seed: int
    d: int
    m: int
    n: int
    family: FamilyTag = FamilyTag.SCALAR
    kind: ForgeKind = ForgeKind.RANDOM
    eps: float = 1e-2

    def __post_init__(self):
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidSpec(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not 1 <= self.d <= MAX_DIM:
            raise InvalidSpec(f"d must lie in 1..{MAX_DIM}, got {self.d}")
        if not 1 <= self.m <= MAX_DIM:
            raise InvalidSpec(f"m must lie in 1..{MAX_DIM}, got {self.m}")
        if self.n < 2:
            raise InvalidSpec(f"n must be at least 2, got {self.n}")
        if not self.eps > 0:
            raise InvalidSpec(f"eps must be positive, got {self.eps}")
        if self.family is FamilyTag.SHIFT:
            raise InvalidSpec("the shift model is checked by shiftcheck, not forged into instances")


def stream_rng(seed: int, stream: Stream) -> np.random.Generator:
    """Independent PCG64 generator for one component of the instance with this seed."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(int(stream),))))


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard complex Gaussian entries (N + iN) / sqrt(2)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_element(
    rng: np.random.Generator,
    m: int,
    d: int,
    min_norm: float = MIN_NORM,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> ModuleElement:
    for _ in range(_MAX_REDRAWS):
        x = ModuleElement(ComplexMatrix(complex_normal(rng, (m, d))))
        if module_norm(x, tol) >= min_norm:
            return x
    raise InvalidSpec(f"could not draw an element of norm >= {min_norm}")


def random_unitary(rng: np.random.Generator, d: int) -> ComplexMatrix:
    """Haar-distributed unitary from the QR factorization of a complex Gaussian matrix."""
    q, r = np.linalg.qr(complex_normal(rng, (d, d)))
    diag = np.diag(r)
    phases = np.where(np.abs(diag) > 0, diag / np.abs(diag), 1.0)
    return ComplexMatrix(q * phases)


def _distinct_uniform(rng: np.random.Generator, count: int, tol: ToleranceConfig) -> List[float]:
    for _ in range(_MAX_REDRAWS):
        values = list(rng.uniform(*SCALE_RANGE, size=count))
        if all(abs(a - b) > 1e3 * tol.tol_eq for j, a in enumerate(values) for b in values[j + 1:]):
            return values
    raise InvalidSpec("could not draw distinct coefficients")


def random_diagonal_pair(
    rng: np.random.Generator,
    d: int,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> CoisometryFamily:
    """|alpha| = |beta| = r with r ~ U(0.5, 2) and independent uniform phases."""
    for _ in range(_MAX_REDRAWS):
        r = rng.uniform(*SCALE_RANGE)
        alpha, beta = r * np.exp(2j * np.pi * rng.uniform(size=2))
        if abs(alpha * alpha - beta * beta) > PAIR_SEPARATION:
            return make_diagonal_pair(alpha, beta, d, tol)
    raise InvalidSpec("could not draw a separated diagonal pair")


def random_scalar_family(
    rng: np.random.Generator,
    n: int,
    d: int,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> CoisometryFamily:
    alphas = []
    while len(alphas) < n:
        alpha = complex(complex_normal(rng, ()))
        if abs(alpha) >= MIN_NORM:
            alphas.append(alpha)
    return make_scalar_family(alphas, d, tol=tol)


def complete_sum_zero(xs: Sequence[ModuleElement]) -> List[ModuleElement]:
    """Append x_n = -(x_1 + ... + x_{n-1})."""
    return list(xs) + [-module_sum(xs)]


def equality_instance(
    y: ModuleElement,
    ts: Sequence[float],
    alphas: Sequence[float],
    unitary: Optional[ComplexMatrix] = None,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> Instance:
    """x_j = t_j y and a_j = alpha_j u with t_j, alpha_j > 0; the upper bound is attained."""
    if len(ts) != len(alphas):
        raise InvalidSpec(f"{len(ts)} multipliers but {len(alphas)} coefficients")
    if min(ts) <= 0 or min(alphas) <= 0:
        raise InvalidSpec("multipliers and coefficients must be positive")
    family = make_scalar_family(alphas, y.algebra_dim, unitary=unitary, tol=tol)
    return Instance.from_family([y * t for t in ts], family)


class InstanceForge:
    """Deterministic instance factory for one spec."""

    def __init__(
        self,
        spec: ForgeSpec,
        tol: ToleranceConfig = DEFAULT_TOLERANCES,
        min_norm: float = MIN_NORM,
    ):
        self.spec = spec
        self.tol = tol
        self.min_norm = min_norm

    def _random_xs(self) -> List[ModuleElement]:
        rng = stream_rng(self.spec.seed, Stream.XS)
        return [random_element(rng, self.spec.m, self.spec.d, self.min_norm, self.tol) for _ in range(self.spec.n)]

    def _sum_zero_xs(self) -> List[ModuleElement]:
        rng = stream_rng(self.spec.seed, Stream.XS)
        for _ in range(_MAX_REDRAWS):
            head = [
                random_element(rng, self.spec.m, self.spec.d, self.min_norm, self.tol)
                for _ in range(self.spec.n - 1)
            ]
            xs = complete_sum_zero(head)
            if module_norm(xs[-1], self.tol) >= self.min_norm:
                return xs
        raise InvalidSpec("could not draw a sum-zero family with a nonzero last element")

    def _family(self, xs: Sequence[ModuleElement]) -> CoisometryFamily:
        rng = stream_rng(self.spec.seed, Stream.FAMILY)
        if self.spec.family is FamilyTag.DIAGONAL_PAIR:
            return repeat_family(random_diagonal_pair(rng, self.spec.d, self.tol), self.spec.n)
        if self.spec.family is FamilyTag.RECIPROCAL_NORM:
            return make_reciprocal_norm_family(xs, self.tol)
        return random_scalar_family(rng, self.spec.n, self.spec.d, self.tol)

    def _equality(self) -> Instance:
        spec = self.spec
        y = random_element(stream_rng(spec.seed, Stream.XS), spec.m, spec.d, self.min_norm, self.tol)
        rng = stream_rng(spec.seed, Stream.FAMILY)
        ts = list(rng.uniform(*SCALE_RANGE, size=spec.n))
        alphas = _distinct_uniform(rng, spec.n, self.tol)
        return equality_instance(y, ts, alphas, random_unitary(rng, spec.d), self.tol)

    def forge(self) -> Instance:
        spec = self.spec
        if spec.kind is ForgeKind.EQUALITY:
            inst = self._equality()
        elif spec.kind is ForgeKind.NEAR_EQUALITY:
            base = self._equality()
            rng = stream_rng(spec.seed, Stream.NOISE)
            xs = [x + ModuleElement(ComplexMatrix(spec.eps * complex_normal(rng, (spec.m, spec.d)))) for x in base.xs]
            inst = Instance(xs=tuple(xs), as_=base.as_, family_tag=base.family_tag)
        else:
            xs = self._sum_zero_xs() if spec.kind is ForgeKind.SUM_ZERO else self._random_xs()
            inst = Instance.from_family(xs, self._family(xs))
        logger.debug("forged %s instance seed=%d d=%d m=%d n=%d", spec.kind.value, spec.seed, spec.d, spec.m, spec.n)
        return validate_instance(inst, self.tol)


def forge(spec: ForgeSpec, tol: ToleranceConfig = DEFAULT_TOLERANCES, min_norm: float = MIN_NORM) -> Instance:
    """Build the instance described by ``spec``; the same spec always gives the same instance.

    Raises:
        InvalidSpec: when the spec is out of range.
    """
    return InstanceForge(spec, tol, min_norm).forge()


# ------------------------------------------------------------ constraint sets

# Targets c_k of random constraint sets are uniform in (-TARGET_RANGE, TARGET_RANGE)
TARGET_RANGE = 1.5


def random_constraint_set(seed: int, count: int, d: int = 2) -> ConstraintSet:
    """``count`` Hermitian constraints trace(rho b_k) = c_k drawn from the NOISE stream of ``seed``.

    Raises:
        InvalidSpec: when count < 1 or d is out of range.
    """
    if count < 1:
        raise InvalidSpec(f"need at least one constraint, got {count}")
    if not 1 <= d <= MAX_DIM:
        raise InvalidSpec(f"d must be in [1, {MAX_DIM}], got {d}")
    rng = stream_rng(seed, Stream.NOISE)
    pairs = []
    for _ in range(count):
        b = complex_normal(rng, (d, d))
        b = 0.5 * (b + b.conj().T)
        pairs.append((b, float(rng.uniform(-TARGET_RANGE, TARGET_RANGE))))
    return ConstraintSet.from_pairs(pairs)
