"""Resolvent identities, the generator A = -𝒢_{λ1}^{-1} - λ1 and its semigroup."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import scipy.linalg as la

from ..configuration import ToleranceConfig, get_tolerance_config
from ..error import BoxMismatch, IdenticalShift, NotContractive, ShiftOutsideLambdaSet
from ..green.kernels import GreenKernel
from ..weighted.spaces import WeightedSpace
from .norms import EXACT_EXPONENTS, matrix_norm, similarity
from .operators import GreenOperator


def _same_box(a, b) -> None:
    if a.radius != b.radius or a.n != b.n:
        raise BoxMismatch(
            f"Kernels live on different boxes ({a.radius} vs {b.radius})",
            {"radii": [a.radius, b.radius]},
        )


def _identical(lam: float, mu: float) -> None:
    if lam == mu:
        raise IdenticalShift(
            f"Resolvent identities need two distinct shifts, got {lam!r} twice",
            {"lambda": lam},
        )


def resolvent_defect(g_lam: GreenKernel, g_mu: GreenKernel) -> float:
    """‖G_λ - G_μ - (λ-μ) G_λ D_{Wν} G_μ‖_max relative to ‖G_λ - G_μ‖_max."""
    _same_box(g_lam, g_mu)
    _identical(g_lam.shift, g_mu.shift)
    wn = g_lam.weight * g_lam.nu
    diff = g_lam.matrix - g_mu.matrix
    product = (g_lam.shift - g_mu.shift) * (g_lam.matrix * wn[None, :]) @ g_mu.matrix
    scale = max(float(np.abs(diff).max()), 1e-300)
    return float(np.abs(diff - product).max()) / scale


def pseudoresolvent_defect(op_lam: GreenOperator, op_mu: GreenOperator) -> float:
    """J(s) = 𝒢_{-s} satisfies J(s) - J(t) = (t - s) J(s) J(t); relative max defect."""
    _same_box(op_lam, op_mu)
    _identical(op_lam.shift, op_mu.shift)
    s, t = -op_lam.shift, -op_mu.shift
    diff = op_lam.kernel - op_mu.kernel
    product = (t - s) * (op_lam.kernel @ op_mu.kernel)
    scale = max(float(np.abs(diff).max()), 1e-300)
    return float(np.abs(diff - product).max()) / scale


def generator(opr: GreenOperator) -> np.ndarray:
    """A = -𝒢_{λ1}^{-1} - λ1 (dense)."""
    return -la.inv(opr.kernel) - opr.shift * np.eye(opr.n)


@dataclass(frozen=True)
class ResolventRow:
    p: str
    lam: complex
    norm: float
    bound: float
    gated: bool

    @property
    def passed(self) -> bool:
        return self.norm <= self.bound


@dataclass(frozen=True)
class ContractionRow:
    p: str
    t: float
    norm: float
    min_entry: float
    gated: bool
    bound: float = 1.0

    @property
    def passed(self) -> bool:
        return self.norm <= self.bound


@dataclass(frozen=True, eq=False)
class GeneratorReport:
    """Generator identity, Hille-Yosida resolvent bounds and the contraction table."""

    radius: int
    lambda1: float
    lambda0: float
    matrix: np.ndarray = field(repr=False)
    identity_defect: float
    resolvent_rows: List[ResolventRow]
    contraction_rows: List[ContractionRow]
    resolvent_min_entries: Dict[float, float]
    positivity_tol: float

    @property
    def contraction_gated(self) -> bool:
        return self.lambda0 > 0

    @property
    def semigroup_positive(self) -> bool:
        return all(row.min_entry >= -self.positivity_tol for row in self.contraction_rows)

    @property
    def resolvent_positive(self) -> bool:
        return all(
            value >= -self.positivity_tol for value in self.resolvent_min_entries.values()
        )

    def violations(self) -> List[Dict[str, Any]]:
        """Gated rows that exceed their bound."""
        failed: List[Dict[str, Any]] = []
        for row in self.resolvent_rows:
            if row.gated and not row.passed:
                failed.append(
                    {"kind": "resolvent", "p": row.p, "lambda": [row.lam.real, row.lam.imag],
                     "norm": row.norm, "bound": row.bound}
                )
        for row in self.contraction_rows:
            if row.gated and not row.passed:
                failed.append(
                    {"kind": "semigroup", "p": row.p, "t": row.t,
                     "norm": row.norm, "bound": row.bound}
                )
        return failed

    def raise_for_violations(self) -> None:
        failed = self.violations()
        if failed:
            first = failed[0]
            raise NotContractive(
                f"{first['kind']} bound violated at p={first['p']} on box {self.radius}",
                {"radius": self.radius, "violations": failed},
            )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "radius": self.radius,
            "lambda1": self.lambda1,
            "lambda0_k": self.lambda0,
            "identity_defect": self.identity_defect,
            "contraction_gated": self.contraction_gated,
            "semigroup_positive": self.semigroup_positive,
            "resolvent_positive": self.resolvent_positive,
            "resolvent": [
                {"p": r.p, "lambda": [r.lam.real, r.lam.imag], "norm": r.norm,
                 "bound": r.bound, "gated": r.gated, "passed": r.passed}
                for r in self.resolvent_rows
            ],
            "semigroup": [
                {"p": r.p, "t": r.t, "norm": r.norm, "min_entry": r.min_entry,
                 "gated": r.gated, "passed": r.passed}
                for r in self.contraction_rows
            ],
            "resolvent_min_entries": {repr(k): v for k, v in self.resolvent_min_entries.items()},
        }


def generator_checks(
    opr: GreenOperator,
    lambda0: float,
    spaces: Sequence[WeightedSpace],
    lam_grid: Sequence[complex],
    t_grid: Sequence[float],
    tolerances: Optional[ToleranceConfig] = None,
) -> GeneratorReport:
    """Build A from 𝒢_{λ1} and tabulate ‖R(λ, A)‖_p and ‖exp(tA)‖_p.

    ``lambda0`` is the principal eigenvalue of the box; rows at p ∈ {1, 2, ∞}
    are gated when it is positive, the rest are reported as diagnostics.
    """
    tol = tolerances or get_tolerance_config()
    if opr.shift >= lambda0:
        raise ShiftOutsideLambdaSet(
            f"λ1 = {opr.shift!r} is not below λ0 = {lambda0!r} of box {opr.radius}",
            {"radius": opr.radius, "lambda1": opr.shift, "lambda0_k": lambda0},
        )
    A = generator(opr)
    wn = opr.weight * opr.nu
    if opr.operator is not None:
        stiffness = opr.operator.dense_stiffness() + opr.shift * np.diag(wn)
    else:
        stiffness = la.inv(opr.green.matrix) + opr.shift * np.diag(wn)
    expected = -stiffness / wn[:, None]
    identity_defect = float(np.abs(A - expected).max() / max(np.abs(expected).max(), 1e-300))

    gated = lambda0 > 0
    identity = np.eye(opr.n)
    resolvent_rows: List[ResolventRow] = []
    resolvent_min: Dict[float, float] = {}
    for lam in lam_grid:
        lam = complex(lam)
        if lam.real <= 0:
            continue
        R = la.solve(lam * identity - A, identity)
        if lam.imag == 0 and lam.real > -lambda0:
            resolvent_min[lam.real] = float(R.real.min() / np.abs(R).max())
        for space in spaces:
            T, measure = similarity(R, space.phi, space.phi_tilde, space.weight, space.nu)
            value, _ = matrix_norm(T, measure, space.p)
            resolvent_rows.append(
                ResolventRow(
                    p=space.key,
                    lam=lam,
                    norm=value,
                    bound=1.0 / lam.real + tol.contraction_abs,
                    gated=gated and space.p in EXACT_EXPONENTS,
                )
            )

    contraction_rows: List[ContractionRow] = []
    for t in t_grid:
        E = la.expm(float(t) * A)
        min_entry = float(E.min() / max(np.abs(E).max(), 1e-300))
        for space in spaces:
            T, measure = similarity(E, space.phi, space.phi_tilde, space.weight, space.nu)
            value, _ = matrix_norm(T, measure, space.p)
            contraction_rows.append(
                ContractionRow(
                    p=space.key,
                    t=float(t),
                    norm=value,
                    min_entry=min_entry,
                    gated=gated and space.p in EXACT_EXPONENTS,
                    bound=1.0 + tol.contraction_abs,
                )
            )

    return GeneratorReport(
        radius=opr.radius,
        lambda1=opr.shift,
        lambda0=lambda0,
        matrix=A,
        identity_defect=identity_defect,
        resolvent_rows=resolvent_rows,
        contraction_rows=contraction_rows,
        resolvent_min_entries=resolvent_min,
        positivity_tol=tol.semigroup_positivity,
    )


def generator_difference(a: GreenOperator, b: GreenOperator) -> float:
    """Relative max difference of the generators built from two shifts."""
    _same_box(a, b)
    A, B = generator(a), generator(b)
    return float(np.abs(A - B).max() / max(np.abs(A).max(), 1e-300))

