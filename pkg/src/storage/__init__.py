# Storage Package
from .models import BoundRow, CertifyRow, SweepSummary
from .store import ArtifactStore

__all__ = ['BoundRow', 'CertifyRow', 'SweepSummary', 'ArtifactStore']
