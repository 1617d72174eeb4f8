"""Configuration management package.

Type-safe settings for tolerances, solver limits and execution, each
overridable from ``CLAB_*`` environment variables.
"""

from .unified import (
    ExecutionConfig,
    SolverConfig,
    ToleranceConfig,
    UnifiedConfig,
    get_solver_config,
    get_tolerance_config,
    get_unified_config,
)

__all__ = [
    "ToleranceConfig",
    "SolverConfig",
    "ExecutionConfig",
    "UnifiedConfig",
    "get_solver_config",
    "get_tolerance_config",
    "get_unified_config",
]
