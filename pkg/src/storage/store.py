"""File persistence for laboratory artefacts."""

import logging
from pathlib import Path
from typing import Any, List, Sequence, Union

from ..core.errors import ArtifactFormatError
from ..engine.certifier import Certificate
from ..engine.inequalities import Instance
from .models import BoundRow, CertifyRow
from .serialization import (
    certificate_from_dict,
    certificate_to_dict,
    csv_to_dicts,
    dumps,
    instance_from_dict,
    instance_to_dict,
    loads,
    rows_to_csv,
)

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

_BOUND_TYPES = {
    'seed': int, 'd': int, 'm': int, 'n': int, 'family': str, 'kind': str,
    'lhs': float, 'upper': float, 'upper_argmin': int, 'lower': float, 'lower_argmax': int,
    'violation': bool, 'specializations_ok': bool,
}
_CERTIFY_TYPES = {
    'seed': int, 'source': str, 'equality': bool, 'certified': bool, 'case_tag': str,
    'i': int, 'l': int, 'max_residual': float, 'gap': float, 'verdict': str,
}


class ArtifactStore:
    """Reads and writes instances, certificates, reports and sweep CSVs."""

    def __init__(self, root: PathLike):
        self.root = Path(root)
        self._ensure_directory(self.root)

    def _ensure_directory(self, path: Path):
        """Create the directory if it doesn't exist."""
        path.mkdir(parents=True, exist_ok=True)

    def resolve(self, path: PathLike) -> Path:
        """Relative paths live under the store root."""
        path = Path(path)
        return path if path.is_absolute() else self.root / path

    def _write(self, path: PathLike, text: str) -> Path:
        target = self.resolve(path)
        self._ensure_directory(target.parent)
        target.write_text(text, encoding='utf-8')
        logger.info("wrote %s", target)
        return target

    def _read(self, path: PathLike) -> str:
        return self.resolve(path).read_text(encoding='utf-8')

    # ==================== JSON ====================

    def save_json(self, payload: Any, path: PathLike) -> Path:
        return self._write(path, dumps(payload))

    def load_json(self, path: PathLike) -> Any:
        return loads(self._read(path))

    # ==================== INSTANCES ====================

    def save_instance(self, inst: Instance, path: PathLike) -> Path:
        return self.save_json(instance_to_dict(inst), path)

    def save_instances(self, instances: Sequence[Instance], path: PathLike) -> Path:
        """A single instance is written bare; several go under ``"instances"``."""
        if len(instances) == 1:
            return self.save_instance(instances[0], path)
        return self.save_json({'instances': [instance_to_dict(inst) for inst in instances]}, path)

    def load_instances(self, path: PathLike) -> List[Instance]:
        data = self.load_json(path)
        if isinstance(data, dict) and 'instances' in data:
            return [instance_from_dict(entry) for entry in data['instances']]
        if isinstance(data, dict):
            return [instance_from_dict(data)]
        raise ArtifactFormatError(f"{path} holds neither an instance nor an instance list")

    def load_instance(self, path: PathLike) -> Instance:
        instances = self.load_instances(path)
        if len(instances) != 1:
            raise ArtifactFormatError(f"{path} holds {len(instances)} instances, expected one")
        return instances[0]

    # ==================== CERTIFICATES ====================

    def save_certificate(self, cert: Certificate, path: PathLike) -> Path:
        return self.save_json(certificate_to_dict(cert), path)

    def load_certificate(self, path: PathLike) -> Certificate:
        data = self.load_json(path)
        if not isinstance(data, dict):
            raise ArtifactFormatError(f"{path} does not hold a certificate object")
        return certificate_from_dict(data)

    # ==================== SWEEP CSV ====================

    def save_bound_rows(self, rows: Sequence[BoundRow], path: PathLike) -> Path:
        return self._write(path, rows_to_csv(rows, BoundRow.columns()))

    def load_bound_rows(self, path: PathLike) -> List[BoundRow]:
        records = csv_to_dicts(self._read(path), _BOUND_TYPES, required=list(_BOUND_TYPES))
        return [BoundRow(**record) for record in records]

    def save_certify_rows(self, rows: Sequence[CertifyRow], path: PathLike) -> Path:
        return self._write(path, rows_to_csv(rows, CertifyRow.columns()))

    def load_certify_rows(self, path: PathLike) -> List[CertifyRow]:
        records = csv_to_dicts(self._read(path), _CERTIFY_TYPES, required=['equality', 'certified', 'verdict'])
        return [CertifyRow(**record) for record in records]


def is_bound_csv(path: PathLike) -> bool:
    """Check-sweep CSVs carry an ``upper`` column; certify CSVs do not."""
    with open(path, 'r', encoding='utf-8') as f:
        header = f.readline().strip().split(',')
    return 'upper' in header
