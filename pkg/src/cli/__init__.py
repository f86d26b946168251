# CLI Package
from .runner import RunConfig, main, run

__all__ = ['RunConfig', 'main', 'run']
