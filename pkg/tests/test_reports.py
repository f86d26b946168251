import json

import pytest

from src.reports.generator import ReportGenerator, summarize, summary_to_dict
from src.storage.models import BoundRow, CertifyRow
from src.storage.store import ArtifactStore
from src.utils.config import Config


def bound(seed, lhs, upper, lower, violation=False, ok=True):
    return BoundRow(seed=seed, d=2, m=2, n=3, family='scalar', kind='random', lhs=lhs, upper=upper,
                    lower=lower, violation=violation, specializations_ok=ok)


@pytest.fixture
def rows():
    return [bound(0, 1.0, 1.5, 0.5), bound(1, 2.0, 2.1, 1.0), bound(2, 1.0, 4.0, 0.9)]


def test_summarize_slacks(rows):
    summary = summarize(rows)
    assert summary.rows == 3
    assert summary.min_slack_upper == pytest.approx(0.1)
    assert summary.median_slack_upper == pytest.approx(0.5)
    assert summary.min_slack_lower == pytest.approx(0.1)
    assert summary.median_slack_lower == pytest.approx(0.5)
    assert summary.is_clean


def test_summarize_counts_failures(rows):
    rows.append(bound(3, 3.0, 2.0, 1.0, violation=True, ok=False))
    certify_rows = [
        CertifyRow(seed=0, verdict='inconclusive'),
        CertifyRow(seed=1, verdict='mismatch'),
        CertifyRow(seed=2, verdict='agree'),
    ]
    summary = summarize(rows, certify_rows)
    assert summary.rows == 7
    assert summary.violations == 1
    assert summary.specialization_failures == 1
    assert summary.inconclusive == 1
    assert summary.mismatches == 1
    assert not summary.is_clean


def test_summarize_without_bound_rows():
    summary = summarize([])
    data = summary_to_dict(summary)
    assert data['min_slack_upper'] is None
    assert data['clean'] is True


def test_json_report_from_mixed_csvs(tmp_path, rows):
    store = ArtifactStore(tmp_path)
    store.save_bound_rows(rows, 'check.csv')
    store.save_certify_rows([CertifyRow(seed=0, verdict='agree', equality=True, certified=True)], 'certify.csv')
    generator = ReportGenerator(store)
    summary = generator.generate_json_report(['check.csv', 'certify.csv'], 'report.json')
    data = json.loads((tmp_path / 'report.json').read_text())
    assert data['rows'] == summary.rows == 4
    assert data['sources'] == ['check.csv', 'certify.csv']
    assert data['clean'] is True


def test_html_report(tmp_path, rows):
    store = ArtifactStore(tmp_path / 'artifacts')
    store.save_bound_rows(rows, 'check.csv')
    generator = ReportGenerator(store, Config(tmp_path / 'data'))
    generator.generate_html_report(['check.csv'], 'report.html')
    html = (tmp_path / 'artifacts' / 'report.html').read_text()
    assert 'Dunkl-Williams Sweep Report' in html
    assert 'clean' in html
    assert '1.000000e-01' in html
    assert 'tol_eq = 1e-09' in html
