"""Unified configuration for the criticality workbench.

Tolerances, solver limits and execution settings live in three
``BaseSettings`` classes so each can be overridden from the environment;
``UnifiedConfig`` aggregates them and applies per-scenario overrides.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Any, Dict, Mapping, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from ..error import ScenarioError


class ToleranceConfig(BaseSettings):
    """Acceptance tolerances for every executable invariant."""

    # Exact finite-dimensional identities
    adjoint_defect: float = Field(default=1e-12, gt=0.0)
    eigen_identity_rel: float = Field(default=1e-10, gt=0.0)
    invariance_abs: float = Field(default=1e-10, gt=0.0)
    resolvent_rel: float = Field(default=1e-10, gt=0.0)
    doob_kernel_abs: float = Field(default=1e-10, gt=0.0)
    spectrum_match: float = Field(default=1e-10, gt=0.0)

    # Norm bounds
    norm_bound_rel: float = Field(default=1e-8, gt=0.0)
    norm_equality_rel: float = Field(default=1e-8, gt=0.0)
    contraction_abs: float = Field(default=1e-9, gt=0.0)
    gelfand_agreement: float = Field(default=1e-6, gt=0.0)

    # Spectral structure
    perron_gap: float = Field(default=1e-8, gt=0.0)
    pde_residual_rel: float = Field(default=1e-8, gt=0.0)
    semigroup_positivity: float = Field(default=1e-12, ge=0.0)

    # Monotonicity slacks
    chain_slack: float = Field(default=1e-12, ge=0.0)
    monotone_slack: float = Field(default=1e-12, ge=0.0)

    # Classification and convergence heuristics
    fit_r2: float = Field(default=0.99, gt=0.0, le=1.0)
    cauchy_ratio: float = Field(default=0.5, gt=0.0, lt=1.0)
    slope_rel: float = Field(default=0.15, gt=0.0)
    stability_ratio: float = Field(default=0.5, gt=0.0)
    semismall_decay_ratio: float = Field(default=0.3, gt=0.0)
    truncation_rel: float = Field(default=0.10, gt=0.0)

    model_config = SettingsConfigDict(env_prefix="CLAB_TOL_", case_sensitive=False)


class SolverConfig(BaseSettings):
    """Linear-algebra limits and sampling settings."""

    # Dense eigen/Green paths are used at or below this node count
    dense_node_limit: int = Field(default=2000, ge=1)
    # Dense tail block for the small-perturbation mode
    small_mode_node_limit: int = Field(default=6000, ge=1)
    spectrum_node_limit: int = Field(default=4000, ge=1)

    # Sparse LU at or below this node count, preconditioned Krylov above
    direct_node_limit: int = Field(default=20000, ge=1)
    krylov_rtol: float = Field(default=1e-13, gt=0.0)
    krylov_max_iterations: int = Field(default=5000, ge=10)

    # Shifted inverse iteration
    max_iterations: int = Field(default=2000, ge=10)
    rtol: float = Field(default=1e-13, gt=0.0)

    random_seed: int = Field(default=20240501)
    random_pairs: int = Field(default=100, ge=1)
    gelfand_n_max: int = Field(default=64, ge=8)

    model_config = SettingsConfigDict(env_prefix="CLAB_SOLVER_", case_sensitive=False)


class ExecutionConfig(BaseSettings):
    """Process-level execution settings."""

    threads: int = Field(default=1, ge=1, le=256)
    log_level: str = Field(default="WARNING")
    log_json: bool = Field(default=False)
    output_dir: str = Field(default="reports")

    model_config = SettingsConfigDict(env_prefix="CLAB_", case_sensitive=False)


class UnifiedConfig(BaseModel):
    """Unified configuration containing all component configurations."""

    tolerances: ToleranceConfig = Field(default_factory=ToleranceConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    execution: ExecutionConfig = Field(default_factory=ExecutionConfig)

    model_config = ConfigDict(validate_assignment=True, extra="forbid")

    def with_overrides(
        self,
        tolerances: Optional[Mapping[str, Any]] = None,
        solver: Optional[Mapping[str, Any]] = None,
    ) -> "UnifiedConfig":
        """Return a copy with a scenario's tolerance/solver tables applied."""
        sections: Dict[str, BaseModel] = {}
        for name, table, current in (
            ("tolerances", tolerances, self.tolerances),
            ("solver", solver, self.solver),
        ):
            if not table:
                continue
            unknown = sorted(set(table) - set(type(current).model_fields))
            if unknown:
                raise ScenarioError(
                    f"Unknown {name} keys: {', '.join(unknown)}",
                    "UNKNOWN_OVERRIDE",
                    {"section": name, "keys": unknown},
                )
            merged = {**current.model_dump(), **dict(table)}
            try:
                sections[name] = type(current).model_validate(merged)
            except ValidationError as exc:
                raise ScenarioError(
                    f"Invalid {name} override: {exc.errors()[0]['msg']}",
                    "INVALID_OVERRIDE",
                    {"section": name},
                ) from exc
        return self.model_copy(update=sections)


@lru_cache(maxsize=1)
def get_unified_config() -> UnifiedConfig:
    """Get cached unified configuration instance."""
    return UnifiedConfig()


def get_tolerance_config() -> ToleranceConfig:
    """Get tolerance configuration."""
    return get_unified_config().tolerances


def get_solver_config() -> SolverConfig:
    """Get solver configuration."""
    return get_unified_config().solver
