"""Sweep summaries as JSON, optionally rendered as a single-file HTML table."""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
from jinja2 import Template

from ..storage.models import BoundRow, CertifyRow, SweepSummary
from ..storage.store import ArtifactStore, PathLike, is_bound_csv
from ..utils.config import Config

logger = logging.getLogger(__name__)


def summarize(bound_rows: Sequence[BoundRow], certify_rows: Sequence[CertifyRow] = ()) -> SweepSummary:
    """Row and violation counts, min/median slacks, certifier disagreements."""
    summary = SweepSummary(rows=len(bound_rows) + len(certify_rows))
    if bound_rows:
        upper = np.array([row.slack_upper for row in bound_rows])
        lower = np.array([row.slack_lower for row in bound_rows])
        summary.violations = sum(1 for row in bound_rows if row.violation)
        summary.specialization_failures = sum(1 for row in bound_rows if not row.specializations_ok)
        summary.min_slack_upper = float(upper.min())
        summary.median_slack_upper = float(np.median(upper))
        summary.min_slack_lower = float(lower.min())
        summary.median_slack_lower = float(np.median(lower))
    summary.inconclusive = sum(1 for row in certify_rows if row.verdict == 'inconclusive')
    summary.mismatches = sum(1 for row in certify_rows if row.verdict == 'mismatch')
    return summary


def summary_to_dict(summary: SweepSummary) -> Dict[str, object]:
    return {
        'rows': summary.rows,
        'violations': summary.violations,
        'specialization_failures': summary.specialization_failures,
        'min_slack_upper': summary.min_slack_upper,
        'median_slack_upper': summary.median_slack_upper,
        'min_slack_lower': summary.min_slack_lower,
        'median_slack_lower': summary.median_slack_lower,
        'inconclusive': summary.inconclusive,
        'mismatches': summary.mismatches,
        'clean': summary.is_clean,
    }


class ReportGenerator:
    """Aggregates sweep CSVs into reports."""

    def __init__(self, store: ArtifactStore, config: Optional[Config] = None):
        self.store = store
        self.config = config

    def load(self, csv_paths: Sequence[PathLike]):
        bound_rows: List[BoundRow] = []
        certify_rows: List[CertifyRow] = []
        for path in csv_paths:
            resolved = self.store.resolve(path)
            if is_bound_csv(resolved):
                bound_rows.extend(self.store.load_bound_rows(resolved))
            else:
                certify_rows.extend(self.store.load_certify_rows(resolved))
        logger.info("loaded %d bound rows and %d certify rows", len(bound_rows), len(certify_rows))
        return bound_rows, certify_rows

    def build_summary(self, csv_paths: Sequence[PathLike]) -> SweepSummary:
        return summarize(*self.load(csv_paths))

    def generate_json_report(self, csv_paths: Sequence[PathLike], output_path: PathLike) -> SweepSummary:
        summary = self.build_summary(csv_paths)
        payload = summary_to_dict(summary)
        payload['sources'] = [str(path) for path in csv_paths]
        self.store.save_json(payload, output_path)
        return summary

    def generate_html_report(self, csv_paths: Sequence[PathLike], output_path: PathLike) -> SweepSummary:
        """Render the same numbers as the JSON report into one HTML file."""
        summary = self.build_summary(csv_paths)
        html = self._render_template(summary, [Path(path).name for path in csv_paths])
        target = self.store.resolve(output_path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(html, encoding='utf-8')
        logger.info("wrote %s", target)
        return summary

    def _format_float(self, value: Optional[float]) -> str:
        return '-' if value is None else f"{value:.6e}"

    def _render_template(self, summary: SweepSummary, sources: List[str]) -> str:
        """Render the HTML report template."""
        template = Template(HTML_TEMPLATE)
        tolerances = self.config.tolerances() if self.config is not None else None
        return template.render(
            summary=summary,
            sources=sources,
            fmt=self._format_float,
            tol_eq=tolerances.tol_eq if tolerances else None,
            tol_feas=tolerances.tol_feas if tolerances else None,
        )


HTML_TEMPLATE = '''<!DOCTYPE html>
<html lang="en">
<head>
    <meta charset="UTF-8">
    <meta name="viewport" content="width=device-width, initial-scale=1.0">
    <title>Dunkl-Williams Sweep Report</title>
    <style>
        * {
            margin: 0;
            padding: 0;
            box-sizing: border-box;
        }
        body {
            font-family: -apple-system, BlinkMacSystemFont, 'Segoe UI', Roboto, sans-serif;
            background-color: #f5f5f5;
            color: #333;
            line-height: 1.6;
        }
        .container {
            max-width: 900px;
            margin: 0 auto;
            padding: 20px;
        }
        header {
            background: linear-gradient(135deg, #1a1a2e 0%, #16213e 100%);
            color: white;
            padding: 30px 20px;
            margin-bottom: 30px;
            border-radius: 10px;
        }
        header h1 {
            font-size: 28px;
            margin-bottom: 10px;
        }
        header p {
            opacity: 0.8;
            font-size: 14px;
        }
        .status {
            display: inline-block;
            padding: 4px 12px;
            border-radius: 12px;
            font-weight: 600;
        }
        .status.clean {
            background: #d4edda;
            color: #155724;
        }
        .status.dirty {
            background: #f8d7da;
            color: #721c24;
        }
        table {
            width: 100%;
            border-collapse: collapse;
            background: white;
            border-radius: 10px;
            overflow: hidden;
            box-shadow: 0 2px 10px rgba(0,0,0,0.05);
            margin-bottom: 20px;
        }
        th, td {
            padding: 12px 15px;
            text-align: left;
            border-bottom: 1px solid #eee;
        }
        th {
            background: #f8f9fa;
            font-weight: 600;
            color: #666;
            font-size: 12px;
            text-transform: uppercase;
        }
        td.number {
            font-family: 'SF Mono', Consolas, monospace;
            text-align: right;
        }
        footer {
            text-align: center;
            padding: 20px;
            color: #999;
            font-size: 12px;
        }
    </style>
</head>
<body>
    <div class="container">
        <header>
            <h1>Dunkl-Williams Sweep Report</h1>
            <p>{{ summary.rows }} rows from {{ sources | length }} file{{ '' if sources | length == 1 else 's' }}</p>
        </header>

        <p>
            {% if summary.is_clean %}
            <span class="status clean">clean</span>
            {% else %}
            <span class="status dirty">violations found</span>
            {% endif %}
        </p>

        <table>
            <thead>
                <tr><th>Quantity</th><th>Value</th></tr>
            </thead>
            <tbody>
                <tr><td>Rows</td><td class="number">{{ summary.rows }}</td></tr>
                <tr><td>Bound violations</td><td class="number">{{ summary.violations }}</td></tr>
                <tr><td>Specialization failures</td><td class="number">{{ summary.specialization_failures }}</td></tr>
                <tr><td>Min slack (upper)</td><td class="number">{{ fmt(summary.min_slack_upper) }}</td></tr>
                <tr><td>Median slack (upper)</td><td class="number">{{ fmt(summary.median_slack_upper) }}</td></tr>
                <tr><td>Min slack (lower)</td><td class="number">{{ fmt(summary.min_slack_lower) }}</td></tr>
                <tr><td>Median slack (lower)</td><td class="number">{{ fmt(summary.median_slack_lower) }}</td></tr>
                <tr><td>Inconclusive certifications</td><td class="number">{{ summary.inconclusive }}</td></tr>
                <tr><td>Certifier mismatches</td><td class="number">{{ summary.mismatches }}</td></tr>
            </tbody>
        </table>

        <table>
            <thead>
                <tr><th>Source</th></tr>
            </thead>
            <tbody>
                {% for source in sources %}
                <tr><td>{{ source }}</td></tr>
                {% endfor %}
            </tbody>
        </table>

        <footer>
            {% if tol_eq is not none %}tol_eq = {{ tol_eq }}, tol_feas = {{ tol_feas }}{% endif %}
        </footer>
    </div>
</body>
</html>
'''
