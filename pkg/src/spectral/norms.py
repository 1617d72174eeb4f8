"""Induced norms of 𝒢_λ on L^p(φ_p), the weighted Schur test and Gelfand radii.

With ρ = φWφ̃ and μ = ρν, the map f ↦ f/φ is an isometry from L^p(φ_p)
onto L^p(μ) for every p, and carries 𝒢 to T̂ = D_φ^{-1} K D_φ. All norms
below are computed for T̂ on L^p(μ): exact for p ∈ {1, 2, ∞}, a
Riesz-Thorin upper bound ‖T̂‖_1^{1/p} ‖T̂‖_∞^{1/p'} otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as la

from ..error import ExponentOutOfRange, OverflowGuard, SpectralError
from ..weighted.spaces import WeightedSpace, conjugate, parse_exponent
from .operators import GreenOperator

EXACT_EXPONENTS = (1.0, 2.0, math.inf)


@dataclass(frozen=True)
class InducedNorm:
    p: str
    value: float
    method: str  # "exact" | "interpolation_bound"
    dual: bool = False

    @property
    def exact(self) -> bool:
        return self.method == "exact"


def similarity(
    kernel: np.ndarray, phi: np.ndarray, phi_tilde: np.ndarray, weight: np.ndarray, nu: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """(T̂, μ) for a kernel acting on L^p(φ_p)."""
    transformed = kernel * phi[None, :] / phi[:, None]
    measure = phi * weight * phi_tilde * nu
    return transformed, measure


def matrix_norm(T: np.ndarray, measure: np.ndarray, p: float) -> Tuple[float, str]:
    """Induced norm of T on L^p(measure); complex T is allowed."""
    if math.isinf(p):
        return float(np.abs(T).sum(axis=1).max()), "exact"
    if p == 1.0:
        columns = (measure[:, None] * np.abs(T)).sum(axis=0) / measure
        return float(columns.max()), "exact"
    if p == 2.0:
        root = np.sqrt(measure)
        scaled = root[:, None] * T / root[None, :]
        return float(la.svdvals(scaled)[0]), "exact"
    one, _ = matrix_norm(T, measure, 1.0)
    sup, _ = matrix_norm(T, measure, math.inf)
    return one ** (1.0 / p) * sup ** (1.0 / conjugate(p)), "interpolation_bound"


def _space_arrays(
    opr: GreenOperator, space: WeightedSpace, dual: bool
) -> Tuple[np.ndarray, np.ndarray]:
    if dual:
        return similarity(opr.dual_kernel, space.phi_tilde, space.phi, space.weight, space.nu)
    return similarity(opr.kernel, space.phi, space.phi_tilde, space.weight, space.nu)


def induced_norm(opr: GreenOperator, space: WeightedSpace, dual: bool = False) -> InducedNorm:
    """‖𝒢_λ‖ on L^p(φ_p), or ‖𝒢_λ^⊙‖ on L^p(φ̃_p) when ``dual``."""
    T, measure = _space_arrays(opr, space, dual)
    value, method = matrix_norm(T, measure, space.p)
    return InducedNorm(p=space.key, value=value, method=method, dual=dual)


@dataclass(frozen=True)
class SchurBound:
    """Suprema of the weighted Schur test and the bounds they imply."""

    p: str
    row_sup: float
    column_sup: float
    target: float

    @property
    def bound(self) -> float:
        return max(self.row_sup, self.column_sup)

    def interpolated(self) -> float:
        p = parse_exponent(self.p)
        return self.column_sup ** (1.0 / p) * self.row_sup ** (1.0 / conjugate(p))

    @property
    def margin(self) -> float:
        """(μ-λ)^{-1} - bound; nonnegative when the invariance inequalities hold."""
        return self.target - self.bound


def schur_bound(
    opr: GreenOperator, space: WeightedSpace, mu: float, lam: Optional[float] = None
) -> SchurBound:
    """Weighted Schur test for 𝒢 on L^p(φ_p), 1 < p < ∞.

    With test functions built from φ and φ̃, the weights of L^p(φ_p) cancel
    in both Schur integrals, leaving the reduced constants
    sup_x (𝒢φ)(x)/φ(x) and sup_y (𝒢^⊙φ̃)(y)/φ̃(y). Neither depends on p;
    ``interpolated()`` is row_sup^{1/p'} column_sup^{1/p}, algebraically the
    weighted Schur bound, and ``bound`` is the p-free max of the two.
    """
    if not 1.0 < space.p < math.inf:
        raise ExponentOutOfRange(
            f"Schur test needs 1 < p < inf, got p={space.key}", {"p": space.key}
        )
    lam = opr.shift if lam is None else lam
    row = opr.apply(space.phi) / space.phi
    column = opr.apply_dual(space.phi_tilde) / space.phi_tilde
    return SchurBound(
        p=space.key,
        row_sup=float(row.max()),
        column_sup=float(column.max()),
        target=1.0 / (mu - lam),
    )


def norm_table(
    opr: GreenOperator, spaces: Iterable[WeightedSpace], dual: bool = False
) -> Dict[str, InducedNorm]:
    return {space.key: induced_norm(opr, space, dual) for space in spaces}


@dataclass(frozen=True)
class GelfandSequence:
    """r_n = ‖T̂^n‖_p^{1/n} for n = 1..n_max."""

    p: str
    values: Tuple[float, ...]

    @property
    def limit(self) -> float:
        return self.values[-1]


def gelfand_radius(
    opr: GreenOperator, space: WeightedSpace, n_max: int = 64, dual: bool = False
) -> GelfandSequence:
    """Norms of renormalized powers; the scale is carried in log form."""
    if n_max < 8:
        raise SpectralError(
            f"Gelfand sequence needs n_max >= 8, got {n_max}", "N_MAX_TOO_SMALL", {"n_max": n_max}
        )
    T, measure = _space_arrays(opr, space, dual)
    power = np.eye(T.shape[0])
    log_scale = 0.0
    values = []
    for n in range(1, n_max + 1):
        power = power @ T
        peak = float(np.abs(power).max())
        if not math.isfinite(peak) or peak == 0.0:
            raise OverflowGuard(
                f"Power {n} of the Green operator lost its scale",
                {"radius": opr.radius, "p": space.key, "n": n},
            )
        power /= peak
        log_scale += math.log(peak)
        norm, _ = matrix_norm(power, measure, space.p)
        values.append(math.exp((log_scale + math.log(norm)) / n))
    return GelfandSequence(p=space.key, values=tuple(values))


def gelfand_spread(sequences: Sequence[GelfandSequence]) -> float:
    """max - min of the final estimates across p."""
    limits = [s.limit for s in sequences]
    return max(limits) - min(limits)


def bound_target(mu: float, lam: float) -> float:
    """(μ - λ)^{-1}, the uniform bound of every induced norm."""
    return 1.0 / (mu - lam)

