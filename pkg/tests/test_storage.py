import json

import numpy as np
import pytest

from src.core.errors import ArtifactFormatError
from src.engine.certifier import certify_sum_nonzero, certify_sum_zero
from src.forge.generator import ForgeKind, ForgeSpec, forge
from src.forge.oracles import exhaustive_index_check
from src.core.coisometry import make_shift_family
from src.storage.models import BoundRow, CertifyRow
from src.storage.serialization import (
    certificate_from_dict,
    certificate_to_dict,
    csv_to_dicts,
    dumps,
    format_value,
    instance_from_dict,
    instance_to_dict,
    loads,
    matrix_from_dict,
    parse_value,
    shift_report_to_dict,
)
from src.storage.store import ArtifactStore, is_bound_csv


@pytest.fixture
def store(tmp_path):
    return ArtifactStore(tmp_path / 'artifacts')


def test_instance_survives_the_store(store):
    inst = forge(ForgeSpec(seed=3, d=2, m=3, n=3, kind=ForgeKind.EQUALITY))
    path = store.save_instance(inst, 'one.json')
    loaded = store.load_instance(path)
    assert loaded.family_tag == inst.family_tag
    assert all(x.mat == y.mat for x, y in zip(loaded.xs, inst.xs))
    assert all(a.mat == b.mat for a, b in zip(loaded.as_, inst.as_))


def test_instance_json_is_byte_stable():
    inst = forge(ForgeSpec(seed=8, d=1, m=2, n=2))
    text = dumps(instance_to_dict(inst))
    assert dumps(instance_to_dict(instance_from_dict(loads(text)))) == text
    assert text.endswith('\n')


def test_several_instances_go_under_a_list(store):
    insts = [forge(ForgeSpec(seed=s, d=1, m=1, n=2)) for s in range(3)]
    store.save_instances(insts, 'many.json')
    assert len(store.load_instances('many.json')) == 3
    with pytest.raises(ArtifactFormatError):
        store.load_instance('many.json')


def test_instance_declared_sizes_are_checked(pair_12):
    data = instance_to_dict(pair_12)
    data['n'] = 3
    with pytest.raises(ArtifactFormatError):
        instance_from_dict(data)
    data = instance_to_dict(pair_12)
    data['d'] = 2
    with pytest.raises(ArtifactFormatError):
        instance_from_dict(data)


def test_malformed_matrices_are_rejected():
    with pytest.raises(ArtifactFormatError):
        matrix_from_dict({'rows': 2, 'cols': 2, 'entries': [[1, 0]]})
    with pytest.raises(ArtifactFormatError):
        matrix_from_dict({'rows': 1, 'cols': 1})
    with pytest.raises(ArtifactFormatError):
        matrix_from_dict({'rows': 1, 'cols': 1, 'entries': [['x', 0]]})


def test_invalid_json_is_an_artifact_error():
    with pytest.raises(ArtifactFormatError):
        loads('{"rows": ')


def test_certificate_codec(sum_zero_112, equality_x_2x):
    for cert in (certify_sum_zero(sum_zero_112), certify_sum_nonzero(equality_x_2x)):
        data = json.loads(dumps(certificate_to_dict(cert)))
        back = certificate_from_dict(data)
        assert back.case_tag is cert.case_tag
        assert (back.i, back.l) == (cert.i, cert.l)
        assert back.state.rho == cert.state.rho
        assert back.residuals == cert.residuals


def test_solver_certificate_dumps_as_plain_json():
    inst = forge(ForgeSpec(seed=7, d=2, m=2, n=3, kind=ForgeKind.EQUALITY))
    cert = certify_sum_nonzero(inst)
    assert cert is not None
    assert type(cert.feasible) is bool
    assert all(type(r) is float for r in cert.residuals)
    data = json.loads(dumps(certificate_to_dict(cert)))
    assert data['feasible'] is True
    back = certificate_from_dict(data)
    assert back.feasible and back.residuals == cert.residuals


def test_certificate_with_bad_rho_is_rejected(pair_12):
    data = certificate_to_dict(certify_sum_nonzero(pair_12))
    data['rho']['entries'] = [[2.0, 0.0]]
    with pytest.raises(ArtifactFormatError, match='density'):
        certificate_from_dict(data)


def test_certificate_with_unknown_case_is_rejected(pair_12):
    data = certificate_to_dict(certify_sum_nonzero(pair_12))
    data['case_tag'] = 'Sideways'
    with pytest.raises(ArtifactFormatError):
        certificate_from_dict(data)


def test_store_certificate_round_trip(store, pair_12):
    cert = certify_sum_nonzero(pair_12)
    store.save_certificate(cert, 'cert.json')
    assert store.load_certificate('cert.json').i == cert.i


@pytest.mark.parametrize('value, text', [
    (None, ''),
    (True, 'true'),
    (False, 'false'),
    (0.1, '0.1'),
    (1e-300, '1e-300'),
    (7, '7'),
    (np.float64(0.1), '0.1'),
    (np.bool_(True), 'true'),
    ('scalar', 'scalar'),
])
def test_format_value(value, text):
    assert format_value(value) == text


def test_parse_value():
    assert parse_value('', int) is None
    assert parse_value('', str) == ''
    assert parse_value('true', bool) is True
    assert parse_value('0.30000000000000004', float) == 0.1 + 0.2
    with pytest.raises(ArtifactFormatError):
        parse_value('yes', bool)
    with pytest.raises(ArtifactFormatError):
        parse_value('1.5', int)


def test_bound_rows_round_trip(store):
    rows = [
        BoundRow(seed=0, d=2, m=2, n=3, family='scalar', kind='random', lhs=1.0, upper=1.5,
                 upper_argmin=2, lower=0.25, lower_argmax=0),
        BoundRow(seed=1, d=2, m=2, n=3, family='diagpair', kind='random', lhs=0.1 + 0.2, upper=0.5,
                 upper_argmin=0, lower=0.1, lower_argmax=1, violation=True, specializations_ok=False),
    ]
    path = store.save_bound_rows(rows, 'check.csv')
    assert is_bound_csv(path)
    assert store.load_bound_rows(path) == rows
    header = path.read_text().splitlines()[0].split(',')
    assert header[-2:] == ['slack_upper', 'slack_lower']


def test_certify_rows_round_trip(store):
    rows = [
        CertifyRow(seed=0, source='forge', equality=True, certified=True, case_tag='SumZero', i=0, l=2,
                   max_residual=0.0, gap=0.0, verdict='agree'),
        CertifyRow(seed=1, source='forge', equality=False, certified=False, gap=0.25, verdict='agree'),
    ]
    path = store.save_certify_rows(rows, 'certify.csv')
    assert not is_bound_csv(path)
    assert store.load_certify_rows(path) == rows


def test_csv_requires_columns():
    with pytest.raises(ArtifactFormatError):
        csv_to_dicts('seed,lhs\n0,1.0\n', {'seed': int, 'upper': float}, required=['upper'])


def test_shift_report_serializes():
    report = exhaustive_index_check(make_shift_family(2, 8), 8)
    data = shift_report_to_dict(report)
    assert data['violations'] == []
    assert data['window'] == 4
    assert json.loads(dumps(data))['n'] == 2
