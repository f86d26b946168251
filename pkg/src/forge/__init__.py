# Forge Package
from .generator import ForgeKind, ForgeSpec, forge
from .oracles import bloch_grid_oracle, exhaustive_index_check

__all__ = ['ForgeKind', 'ForgeSpec', 'forge', 'bloch_grid_oracle', 'exhaustive_index_check']
