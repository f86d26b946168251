"""Row models for sweep artefacts."""

from dataclasses import dataclass, fields
from typing import Optional


@dataclass
class BoundRow:
    """One instance of a ``check`` sweep."""
    seed: int = 0
    d: int = 0
    m: int = 0
    n: int = 0
    family: str = ""
    kind: str = ""
    lhs: float = 0.0
    upper: float = 0.0
    upper_argmin: int = 0
    lower: float = 0.0
    lower_argmax: int = 0
    violation: bool = False
    specializations_ok: bool = True

    @property
    def slack_upper(self) -> float:
        return self.upper - self.lhs

    @property
    def slack_lower(self) -> float:
        return self.lhs - self.lower

    @classmethod
    def columns(cls) -> list:
        return [f.name for f in fields(cls)] + ['slack_upper', 'slack_lower']


@dataclass
class CertifyRow:
    """One instance of a ``certify`` run."""
    seed: int = 0
    source: str = ""
    equality: bool = False
    certified: bool = False
    case_tag: str = ""
    i: Optional[int] = None
    l: Optional[int] = None
    max_residual: Optional[float] = None
    gap: float = 0.0
    verdict: str = ""

    @property
    def agrees(self) -> bool:
        return self.equality == self.certified

    @classmethod
    def columns(cls) -> list:
        return [f.name for f in fields(cls)]


@dataclass
class SweepSummary:
    """Aggregate of one or more ``check`` CSVs."""
    rows: int = 0
    violations: int = 0
    specialization_failures: int = 0
    min_slack_upper: Optional[float] = None
    median_slack_upper: Optional[float] = None
    min_slack_lower: Optional[float] = None
    median_slack_lower: Optional[float] = None
    inconclusive: int = 0
    mismatches: int = 0

    @property
    def is_clean(self) -> bool:
        """No bound violation, failed specialization or certifier mismatch."""
        return self.violations == 0 and self.specialization_failures == 0 and self.mismatches == 0
