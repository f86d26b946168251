"""JSON and CSV codecs for instances, certificates and sweep rows.

Matrices are written as ``{"rows", "cols", "entries": [[re, im], ...]}`` in
row-major order; module elements add ``"algebra_dim"``. JSON keys are sorted
and floats use the shortest round-trip representation so identical runs give
byte-identical files.
"""

import csv
import io
import json
from dataclasses import asdict
from typing import Any, Dict, Iterable, List, Optional, Type

import numpy as np

from ..core.algebra import ComplexMatrix, State
from ..core.errors import ArtifactFormatError, LabError
from ..core.module_space import AlgebraElement, ModuleElement
from ..engine.certifier import CaseTag, Certificate
from ..engine.inequalities import Instance
from ..forge.oracles import OracleComparison, OracleResult, ShiftCheckReport


def dumps(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + '\n'


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ArtifactFormatError(f"invalid JSON: {e}") from e


def _field(data: Dict[str, Any], key: str) -> Any:
    try:
        return data[key]
    except (KeyError, TypeError):
        raise ArtifactFormatError(f"missing field {key!r}") from None


# ---------------------------------------------------------------------- matrices

def matrix_to_dict(mat: ComplexMatrix) -> Dict[str, Any]:
    return {
        'rows': mat.rows,
        'cols': mat.cols,
        'entries': [[z.real, z.imag] for z in mat.entries],
    }


def matrix_from_dict(data: Dict[str, Any]) -> ComplexMatrix:
    try:
        rows, cols = int(_field(data, 'rows')), int(_field(data, 'cols'))
        entries = [complex(float(re), float(im)) for re, im in _field(data, 'entries')]
        return ComplexMatrix.from_entries(rows, cols, entries)
    except ArtifactFormatError:
        raise
    except (LabError, TypeError, ValueError) as e:
        raise ArtifactFormatError(f"malformed matrix: {e}") from e


def module_element_to_dict(x: ModuleElement) -> Dict[str, Any]:
    data = matrix_to_dict(x.mat)
    data['algebra_dim'] = x.algebra_dim
    return data


def module_element_from_dict(data: Dict[str, Any]) -> ModuleElement:
    mat = matrix_from_dict(data)
    try:
        return ModuleElement(mat, int(data.get('algebra_dim', mat.cols)))
    except LabError as e:
        raise ArtifactFormatError(f"malformed module element: {e}") from e


# --------------------------------------------------------------------- instances

def instance_to_dict(inst: Instance) -> Dict[str, Any]:
    return {
        'd': inst.d,
        'm': inst.m,
        'n': inst.n,
        'xs': [module_element_to_dict(x) for x in inst.xs],
        'as': [matrix_to_dict(a.mat) for a in inst.as_],
        'family_tag': inst.family_tag,
    }


def instance_from_dict(data: Dict[str, Any]) -> Instance:
    xs = [module_element_from_dict(x) for x in _field(data, 'xs')]
    as_ = []
    for entry in _field(data, 'as'):
        mat = matrix_from_dict(entry)
        if not mat.is_square:
            raise ArtifactFormatError(f"coefficient of shape {mat.shape} is not square")
        as_.append(AlgebraElement(mat))
    inst = Instance(xs=tuple(xs), as_=tuple(as_), family_tag=data.get('family_tag'))
    if not xs or len(xs) != int(_field(data, 'n')):
        raise ArtifactFormatError(f"instance declares n={data['n']} but lists {len(xs)} elements")
    if (inst.d, inst.m) != (int(_field(data, 'd')), int(_field(data, 'm'))):
        raise ArtifactFormatError("declared d, m do not match the element shapes")
    return inst


# ------------------------------------------------------------------ certificates

def certificate_to_dict(cert: Certificate) -> Dict[str, Any]:
    return {
        'case_tag': cert.case_tag.value,
        'i': cert.i,
        'l': cert.l,
        'rho': matrix_to_dict(cert.state.rho),
        'residuals': [float(r) for r in cert.residuals],
        'feasible': bool(cert.feasible),
    }


def certificate_from_dict(data: Dict[str, Any]) -> Certificate:
    try:
        case_tag = CaseTag(_field(data, 'case_tag'))
    except ValueError:
        raise ArtifactFormatError(f"unknown case tag {data['case_tag']!r}") from None
    try:
        state = State(matrix_from_dict(_field(data, 'rho')))
    except ArtifactFormatError:
        raise
    except LabError as e:
        raise ArtifactFormatError(f"rho is not a density matrix: {e}") from e
    l = data.get('l')
    return Certificate(
        case_tag=case_tag,
        i=int(_field(data, 'i')),
        l=None if l is None else int(l),
        state=state,
        residuals=tuple(float(r) for r in data.get('residuals', ())),
        feasible=bool(data.get('feasible', False)),
    )


# ------------------------------------------------------------------ oracle reports

def oracle_result_to_dict(result: OracleResult) -> Dict[str, Any]:
    return {
        'feasible': bool(result.feasible),
        'margin': float(result.margin),
        'witness': [float(w) for w in result.witness],
    }


def oracle_comparison_to_dict(seed: int, comparison: OracleComparison) -> Dict[str, Any]:
    payload = oracle_result_to_dict(comparison.oracle)
    payload.update(
        seed=seed,
        lipschitz=float(comparison.oracle.lipschitz),
        band=float(comparison.band),
        in_band=bool(comparison.in_band),
        solver=comparison.solver.value,
        solver_iterations=int(comparison.iterations),
        agrees=bool(comparison.agrees),
    )
    return payload


def shift_report_to_dict(report: ShiftCheckReport) -> Dict[str, Any]:
    return asdict(report)


# ----------------------------------------------------------------------------- CSV

def format_value(value: Any) -> str:
    """Shortest round-trip text for floats, ``true``/``false`` for booleans, empty for None."""
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def parse_value(text: str, kind: Type) -> Any:
    if text == '':
        return '' if kind is str else None
    try:
        if kind is bool:
            if text not in ('true', 'false'):
                raise ValueError(f"not a boolean: {text!r}")
            return text == 'true'
        return kind(text)
    except ValueError as e:
        raise ArtifactFormatError(f"bad CSV value {text!r}: {e}") from e


def rows_to_csv(rows: Iterable[Any], columns: List[str]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(getattr(row, column)) for column in columns])
    return out.getvalue()


def csv_to_dicts(text: str, types: Dict[str, Type], required: Optional[List[str]] = None) -> List[Dict[str, Any]]:
    """Parse CSV text; only columns named in ``types`` are converted and kept."""
    reader = csv.DictReader(io.StringIO(text))
    header = reader.fieldnames or []
    missing = [column for column in (required or []) if column not in header]
    if missing:
        raise ArtifactFormatError(f"CSV lacks columns {missing}")
    return [
        {column: parse_value(raw[column], kind) for column, kind in types.items() if column in raw}
        for raw in reader
    ]
