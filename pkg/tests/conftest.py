"""Shared fixtures: tolerances, seeded generators and the worked instances."""

import numpy as np
import pytest

from src.core.algebra import ComplexMatrix
from src.core.coisometry import make_reciprocal_norm_family, make_scalar_family
from src.core.module_space import ModuleElement
from src.engine.inequalities import Instance
from src.utils.config import ToleranceConfig


def scalar(value: complex) -> ModuleElement:
    """A 1x1 module element of the d = 1 module C."""
    return ModuleElement(ComplexMatrix([[value]]))


def column(*values: complex) -> ModuleElement:
    return ModuleElement.column(values)


def scalar_instance(xs, alphas, d: int = 1) -> Instance:
    return Instance.from_family(xs, make_scalar_family(alphas, d))


@pytest.fixture
def tol():
    return ToleranceConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def pair_12():
    """d = 1, xs = {1, 2} with reciprocal norms {1, 1/2}; equality at index 1."""
    xs = [scalar(1), scalar(2)]
    return Instance.from_family(xs, make_reciprocal_norm_family(xs))


@pytest.fixture
def sum_zero_112():
    """d = 1, xs = {1, 1, -2} with {1, 1, 1/2}; sum-zero equality."""
    return scalar_instance([scalar(1), scalar(1), scalar(-2)], [1, 1, 0.5])


@pytest.fixture
def strict_31():
    """d = 1, xs = {(3, 0), (0, 1)} with {1/3, 1}; strict inequality."""
    return scalar_instance([column(3, 0), column(0, 1)], [1 / 3, 1])


@pytest.fixture
def x_2x2():
    """A 2x2 module element whose <x, x> has distinct eigenvalues."""
    return ModuleElement.from_rows([[1.0, 0.5], [0.0, 1.0]])


@pytest.fixture
def unitary_2():
    h = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
    return ComplexMatrix(h @ np.diag([1, 1j]))


@pytest.fixture
def equality_x_2x(x_2x2, unitary_2):
    """xs = {x, x}, as_ = {u, 2u}: attains the upper bound at index 0."""
    family = make_scalar_family([1, 2], 2, unitary=unitary_2)
    return Instance.from_family([x_2x2, x_2x2], family)


@pytest.fixture
def config_dir(tmp_path, monkeypatch):
    monkeypatch.delenv('DWMOD_SEED', raising=False)
    path = tmp_path / 'data'
    path.mkdir()
    return path
