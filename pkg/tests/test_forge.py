import numpy as np
import pytest

from src.core.coisometry import FamilyTag, family_defects
from src.core.errors import InvalidSpec
from src.core.module_space import module_norm, module_sum
from src.engine.certifier import Verdict, certify, verify_certificate
from src.engine.inequalities import check_theorem, instance_defects
from src.forge.generator import (
    ForgeKind,
    ForgeSpec,
    Stream,
    complete_sum_zero,
    equality_instance,
    forge,
    random_unitary,
    stream_rng,
)
from src.utils.config import ToleranceConfig

from .conftest import scalar


def same_instance(a, b):
    return (
        len(a.xs) == len(b.xs)
        and all(x.mat == y.mat for x, y in zip(a.xs, b.xs))
        and all(p.mat == q.mat for p, q in zip(a.as_, b.as_))
        and a.family_tag == b.family_tag
    )


@pytest.mark.parametrize('family', [FamilyTag.SCALAR, FamilyTag.DIAGONAL_PAIR, FamilyTag.RECIPROCAL_NORM])
@pytest.mark.parametrize('kind', list(ForgeKind))
def test_forge_is_deterministic(family, kind):
    spec = ForgeSpec(seed=11, d=2, m=3, n=3, family=family, kind=kind)
    assert same_instance(forge(spec), forge(spec))


def test_different_seeds_give_different_instances():
    a = forge(ForgeSpec(seed=1, d=2, m=2, n=3))
    b = forge(ForgeSpec(seed=2, d=2, m=2, n=3))
    assert not same_instance(a, b)


def test_elements_do_not_depend_on_family():
    a = forge(ForgeSpec(seed=5, d=2, m=2, n=4, family=FamilyTag.SCALAR))
    b = forge(ForgeSpec(seed=5, d=2, m=2, n=4, family=FamilyTag.DIAGONAL_PAIR))
    assert all(x.mat == y.mat for x, y in zip(a.xs, b.xs))


def test_streams_are_independent():
    xs = stream_rng(3, Stream.XS).standard_normal(4)
    family = stream_rng(3, Stream.FAMILY).standard_normal(4)
    assert not np.array_equal(xs, family)
    np.testing.assert_array_equal(xs, stream_rng(3, Stream.XS).standard_normal(4))


@pytest.mark.parametrize('kwargs', [
    dict(seed=-1, d=2, m=2, n=2),
    dict(seed=0, d=0, m=2, n=2),
    dict(seed=0, d=65, m=2, n=2),
    dict(seed=0, d=2, m=0, n=2),
    dict(seed=0, d=2, m=2, n=1),
    dict(seed=0, d=2, m=2, n=2, eps=0.0),
    dict(seed=0, d=2, m=2, n=2, family=FamilyTag.SHIFT),
])
def test_spec_validation(kwargs):
    with pytest.raises(InvalidSpec):
        ForgeSpec(**kwargs)


def test_forge_kind_parse():
    assert ForgeKind.parse('near') is ForgeKind.NEAR_EQUALITY
    with pytest.raises(InvalidSpec):
        ForgeKind.parse('strict')


def test_complete_sum_zero_on_scalars():
    xs = complete_sum_zero([scalar(1), scalar(1)])
    assert xs[2].mat.entries == (-2,)


@pytest.mark.parametrize('seed', range(5))
def test_sum_zero_kind_sums_to_zero(seed):
    inst = forge(ForgeSpec(seed=seed, d=2, m=3, n=4, kind=ForgeKind.SUM_ZERO))
    assert module_norm(module_sum(inst.xs)) <= 1e-12


def test_random_unitary_is_unitary():
    u = random_unitary(stream_rng(9, Stream.FAMILY), 4).data
    np.testing.assert_allclose(u @ u.conj().T, np.eye(4), atol=1e-12)


def test_equality_instance_matches_collinear_construction(x_2x2, unitary_2):
    inst = equality_instance(x_2x2, [1, 1], [1, 2], unitary_2)
    report = check_theorem(inst)
    assert report.upper == pytest.approx(3 * module_norm(x_2x2))
    assert report.slack_upper == pytest.approx(0.0, abs=1e-9)


def test_equality_instance_rejects_nonpositive_parameters(x_2x2):
    with pytest.raises(InvalidSpec):
        equality_instance(x_2x2, [1, -1], [1, 2])
    with pytest.raises(InvalidSpec):
        equality_instance(x_2x2, [1], [1, 2])


@pytest.mark.parametrize('family', [FamilyTag.SCALAR, FamilyTag.DIAGONAL_PAIR, FamilyTag.RECIPROCAL_NORM])
def test_forged_instances_are_valid(family):
    for seed in range(10):
        inst = forge(ForgeSpec(seed=seed, d=2, m=2, n=3, family=family))
        assert instance_defects(inst) == []
        assert family_defects(inst.as_) == []
        assert inst.family_tag == family.value


@pytest.mark.parametrize('seed', range(8))
def test_equality_kind_is_certified(seed):
    inst = forge(ForgeSpec(seed=seed, d=2, m=2, n=3, kind=ForgeKind.EQUALITY))
    outcome = certify(inst)
    assert outcome.equality
    assert outcome.certificate is not None
    assert outcome.verdict is Verdict.AGREE


@pytest.mark.parametrize('seed', range(8))
def test_random_kind_is_sound(seed):
    inst = forge(ForgeSpec(seed=seed, d=2, m=2, n=3, kind=ForgeKind.RANDOM))
    outcome = certify(inst)
    assert outcome.verdict is not Verdict.MISMATCH
    if outcome.certificate is not None:
        assert outcome.equality


def test_near_equality_gap_shrinks_with_eps():
    gaps = []
    for eps in (1e-1, 1e-2, 1e-3):
        inst = forge(ForgeSpec(seed=4, d=2, m=2, n=3, kind=ForgeKind.NEAR_EQUALITY, eps=eps))
        gaps.append(check_theorem(inst).slack_upper)
    assert gaps[0] > gaps[1] > gaps[2] >= 0.0


@pytest.mark.slow
def test_equality_kind_certifies_at_scale():
    tol = ToleranceConfig()
    for seed in range(100):
        inst = forge(ForgeSpec(seed=seed, d=2, m=2, n=3, kind=ForgeKind.EQUALITY), tol)
        outcome = certify(inst, tol, seed)
        assert outcome.verdict is Verdict.AGREE, seed
        assert outcome.certificate is not None, seed
        assert outcome.certificate.max_residual <= 1e-7
        assert verify_certificate(inst, outcome.certificate, tol).valid, seed


@pytest.mark.slow
def test_strict_random_instances_never_certify():
    tol = ToleranceConfig()
    strict = 0
    for seed in range(1000):
        inst = forge(ForgeSpec(seed=seed, d=2, m=2, n=3, kind=ForgeKind.RANDOM), tol)
        outcome = certify(inst, tol, seed)
        if outcome.gap <= 1e-3:
            continue
        assert outcome.certificate is None, seed
        assert outcome.verdict is Verdict.AGREE, seed
        strict += 1
        if strict == 100:
            break
    assert strict == 100


@pytest.mark.slow
def test_near_equality_median_gap_is_monotone_in_eps():
    medians = []
    for eps in (1e-1, 1e-2, 1e-3):
        gaps = [
            check_theorem(forge(ForgeSpec(seed=seed, d=2, m=2, n=3, kind=ForgeKind.NEAR_EQUALITY, eps=eps))).slack_upper
            for seed in range(100)
        ]
        assert min(gaps) >= -1e-9
        medians.append(float(np.median(gaps)))
    assert medians[0] > medians[1] > medians[2] > 0.0
    # median slack_upper <= C eps, with C taken from the coarsest scale
    ratios = [median / eps for median, eps in zip(medians, (1e-1, 1e-2, 1e-3))]
    assert max(ratios) <= 3 * ratios[0]
