"""Exhaustion limits: λ0 extrapolation, criticality trichotomy, Green growth."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from ..configuration import ToleranceConfig, UnifiedConfig, get_unified_config
from ..error import DomainError
from ..lattice.domain import Exhaustion
from ..observability import get_logger
from ..operators.assembly import OperatorSpec, assemble, shift
from .kernels import GreenSolver, PrincipalPair, principal_pair


class Criticality(str, Enum):
    """Criticality class of L - λW at the classification shift."""

    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True, eq=False)
class BoxGroundState:
    """Principal data of one box plus the Green probe values at the classification shift."""

    radius: int
    n: int
    pair: PrincipalPair
    mass: float
    diagonal_at_probe: float
    probes: Dict[str, float] = field(default_factory=dict)

    @property
    def eigenvalue(self) -> float:
        return self.pair.eigenvalue

    @property
    def green_probe(self) -> Optional[float]:
        return self.probes.get("x0,y0")


@dataclass(frozen=True)
class Lambda0Estimate:
    """λ0^{(k)} sequence with its Richardson extrapolation."""

    radii: Tuple[int, ...]
    values: Tuple[float, ...]
    limit: float
    error: float
    tol_pos: float

    @property
    def decrements(self) -> Tuple[float, ...]:
        return tuple(a - b for a, b in zip(self.values, self.values[1:]))

    @property
    def strictly_decreasing(self) -> bool:
        return all(d > 1e-10 * max(1.0, abs(v)) for d, v in zip(self.decrements, self.values))


@dataclass(frozen=True)
class GrowthFit:
    """Growth diagnostics of k ↦ G^{Ω_k}(x0, y0)."""

    model: str
    slope: float
    intercept: float
    r2: float
    r2_log: float
    r2_linear: float
    walk_slope: float
    cauchy_ratios: Tuple[float, ...]

    @property
    def convergent(self) -> bool:
        return bool(self.cauchy_ratios) and all(math.isfinite(r) for r in self.cauchy_ratios)


@dataclass(frozen=True, eq=False)
class GroundStateReport:
    """λ0 estimates, normalized ground states per box and the criticality verdict."""

    at_shift: float
    boxes: Tuple[BoxGroundState, ...]
    lambda0: Optional[Lambda0Estimate]
    criticality: Criticality
    basis: str
    growth: Optional[GrowthFit] = None
    mass_trend: str = "inconclusive"

    def box(self, k: int) -> BoxGroundState:
        for state in self.boxes:
            if state.radius == k:
                return state
        raise KeyError(k)

    @property
    def largest(self) -> BoxGroundState:
        return self.boxes[-1]

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "at_shift": self.at_shift,
            "criticality": self.criticality.value,
            "basis": self.basis,
            "mass_trend": self.mass_trend,
            "boxes": [
                {
                    "radius": b.radius,
                    "n": b.n,
                    "lambda0_k": b.eigenvalue,
                    "method": b.pair.method,
                    "z_mass_k": b.mass,
                    "probes": dict(sorted(b.probes.items())),
                }
                for b in self.boxes
            ],
        }
        if self.lambda0 is not None:
            data["lambda0"] = {
                "values": list(self.lambda0.values),
                "limit": self.lambda0.limit,
                "error": self.lambda0.error,
                "tol_pos": self.lambda0.tol_pos,
                "strictly_decreasing": self.lambda0.strictly_decreasing,
            }
        if self.growth is not None:
            data["growth"] = {
                "model": self.growth.model,
                "slope": self.growth.slope,
                "intercept": self.growth.intercept,
                "r2": self.growth.r2,
                "r2_log": self.growth.r2_log,
                "r2_linear": self.growth.r2_linear,
                "walk_slope": self.growth.walk_slope,
                "cauchy_ratios": list(self.growth.cauchy_ratios),
            }
        return data


def extrapolate_lambda0(radii: Sequence[int], values: Sequence[float]) -> Lambda0Estimate:
    """Two-point Richardson extrapolation in h = (k+1)^{-2} over the last two radii.

    The limit is clamped to the last iterate; the error band is the last
    difference and ``tol_pos`` ten times that band.
    """
    if len(values) < 2:
        raise DomainError(
            "λ0 extrapolation needs at least two radii",
            "TOO_FEW_RADII",
            {"radii": list(radii)},
        )
    h = [1.0 / (k + 1) ** 2 for k in radii[-2:]]
    v_prev, v_last = values[-2], values[-1]
    slope = (v_prev - v_last) / (h[0] - h[1])
    limit = min(v_last - slope * h[1], v_last)
    error = abs(v_prev - v_last)
    return Lambda0Estimate(
        radii=tuple(int(k) for k in radii),
        values=tuple(float(v) for v in values),
        limit=float(limit),
        error=float(error),
        tol_pos=10.0 * float(error),
    )


def _r2(x: np.ndarray, y: np.ndarray) -> Tuple[float, float, float]:
    if np.ptp(y) == 0.0:
        return 0.0, float(y[0]), 0.0
    fit = stats.linregress(x, y)
    return float(fit.slope), float(fit.intercept), float(fit.rvalue**2)


def fit_green_growth(
    radii: Sequence[int], values: Sequence[float], probe_diagonal: float = 1.0
) -> GrowthFit:
    """Fit G(x0, y0; k) against ln k and k; keep the model with the higher R²."""
    k = np.asarray(radii, dtype=float)
    g = np.asarray(values, dtype=float)
    slope_log, icpt_log, r2_log = _r2(np.log(k), g)
    slope_lin, icpt_lin, r2_lin = _r2(k, g)
    if r2_log >= r2_lin:
        model, slope, intercept, r2 = "log", slope_log, icpt_log, r2_log
    else:
        model, slope, intercept, r2 = "linear", slope_lin, icpt_lin, r2_lin

    diffs = np.diff(g)
    ratios = tuple(
        float(abs(b) / abs(a)) if a != 0 else math.inf for a, b in zip(diffs, diffs[1:])
    )
    return GrowthFit(
        model=model,
        slope=slope,
        intercept=intercept,
        r2=r2,
        r2_log=r2_log,
        r2_linear=r2_lin,
        walk_slope=slope * probe_diagonal,
        cauchy_ratios=ratios,
    )


def _probe_nodes(ex: Exhaustion) -> Dict[str, Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    x0 = ex.anchor
    y0 = ex.probe
    back = (x0[0] - 1,) + tuple(x0[1:])
    pairs = {
        "x0,x0": (x0, x0),
        "x0,y0": (x0, y0),
        "y0,x0": (y0, x0),
        "y0,y0": (y0, y0),
    }
    if max(abs(c) for c in back) <= ex.radii[0]:
        pairs["x0-e1,x0"] = (back, x0)
    return pairs


def _box_state(
    spec: OperatorSpec,
    ex: Exhaustion,
    k: int,
    at_shift: float,
    config: UnifiedConfig,
    with_probes: bool,
) -> BoxGroundState:
    op = assemble(spec, ex, k)
    pair = principal_pair(op, anchor=ex.anchor, config=config.solver)
    shifted = shift(op, at_shift)
    probes: Dict[str, float] = {}
    y0_row = op.row(ex.probe if ex.probe in op.nodes else ex.anchor)
    if with_probes and at_shift < pair.eigenvalue:
        solver = GreenSolver(shifted, config=config.solver)
        columns = {}
        for name, (x, y) in _probe_nodes(ex).items():
            if x not in op.nodes or y not in op.nodes:
                continue
            if y not in columns:
                columns[y] = solver.column(y)
            probes[name] = float(columns[y][op.row(x)])
    return BoxGroundState(
        radius=k,
        n=op.n,
        pair=pair,
        mass=pair.mass(op),
        diagonal_at_probe=float(shifted.stiffness[y0_row, y0_row]),
        probes=probes,
    )


def box_ground_states(
    spec: OperatorSpec,
    ex: Exhaustion,
    at_shift: float = 0.0,
    config: Optional[UnifiedConfig] = None,
    with_probes: bool = True,
) -> Tuple[BoxGroundState, ...]:
    """Principal pairs (and Green probes) for every exhaustion radius, ordered by k."""
    cfg = config or get_unified_config()
    with ThreadPoolExecutor(max_workers=cfg.execution.threads) as pool:
        states = pool.map(
            lambda k: _box_state(spec, ex, k, at_shift, cfg, with_probes), ex.radii
        )
        return tuple(states)


def lambda0_limit(
    spec: OperatorSpec,
    ex: Exhaustion,
    config: Optional[UnifiedConfig] = None,
    boxes: Optional[Sequence[BoxGroundState]] = None,
) -> Lambda0Estimate:
    """λ0^{(k)} over the exhaustion and its extrapolated limit (needs ≥ 3 radii)."""
    if len(ex.radii) < 3:
        raise DomainError(
            f"λ0 limit needs at least 3 radii, got {len(ex.radii)}",
            "TOO_FEW_RADII",
            {"radii": list(ex.radii)},
        )
    boxes = boxes or box_ground_states(spec, ex, config=config, with_probes=False)
    return extrapolate_lambda0(ex.radii, [b.eigenvalue for b in boxes])


def mass_trend(masses: Sequence[float], rel: float = 0.10) -> str:
    """Bounded Σ φWφ̃ν suggests positive criticality, growth suggests null criticality."""
    if len(masses) < 2:
        return "inconclusive"
    last, prev = masses[-1], masses[-2]
    increment = (last - prev) / prev
    if abs(increment) < rel:
        return "positive"
    if all(b > a for a, b in zip(masses, masses[1:])):
        return "null"
    return "inconclusive"


def decide_criticality(
    estimate: Lambda0Estimate,
    at_shift: float,
    growth: Optional[GrowthFit],
    tolerances: ToleranceConfig,
) -> Tuple[Criticality, str]:
    """Trichotomy at the shift; near λ0 = 0 convergence is tested before divergence."""
    lam = estimate.limit - at_shift
    if lam > estimate.tol_pos:
        return Criticality.SUBCRITICAL, "lambda0_positive"
    if lam < -estimate.tol_pos:
        return Criticality.SUPERCRITICAL, "lambda0_negative"
    if growth is None:
        return Criticality.INCONCLUSIVE, "green_probes_unavailable"
    if growth.convergent and all(r < tolerances.cauchy_ratio for r in growth.cauchy_ratios):
        return Criticality.SUBCRITICAL, "green_converges"
    if growth.r2 >= tolerances.fit_r2 and growth.slope > 0:
        return Criticality.CRITICAL, "green_diverges"
    return Criticality.INCONCLUSIVE, "no_growth_model"


def classify(
    spec: OperatorSpec,
    ex: Exhaustion,
    at_shift: float = 0.0,
    config: Optional[UnifiedConfig] = None,
    boxes: Optional[Sequence[BoxGroundState]] = None,
) -> GroundStateReport:
    """Classify L - at_shift·W as subcritical, critical, supercritical or inconclusive.

    ``boxes`` may carry states already computed at the same shift.
    """
    cfg = config or get_unified_config()
    if boxes is None:
        boxes = box_ground_states(spec, ex, at_shift=at_shift, config=cfg)
    boxes = tuple(boxes)
    masses = [b.mass for b in boxes]
    trend = mass_trend(masses, cfg.tolerances.truncation_rel)

    if len(ex.radii) < 3:
        return GroundStateReport(
            at_shift=at_shift,
            boxes=boxes,
            lambda0=None,
            criticality=Criticality.INCONCLUSIVE,
            basis="too_few_radii",
            mass_trend=trend,
        )

    estimate = lambda0_limit(spec, ex, config=cfg, boxes=boxes)
    growth = None
    probes = [b.green_probe for b in boxes]
    if all(p is not None for p in probes):
        growth = fit_green_growth(ex.radii, probes, boxes[-1].diagonal_at_probe)

    verdict, basis = decide_criticality(estimate, at_shift, growth, cfg.tolerances)
    get_logger().log_check(
        "criticality", passed=verdict is not Criticality.INCONCLUSIVE, value=estimate.limit
    )
    return GroundStateReport(
        at_shift=at_shift,
        boxes=boxes,
        lambda0=estimate,
        criticality=verdict,
        basis=basis,
        growth=growth,
        mass_trend=trend,
    )


def green_monotonicity(boxes: Sequence[BoxGroundState]) -> Dict[str, List[float]]:
    """Increments G^{Ω_{k+1}}(x, y) - G^{Ω_k}(x, y) per probe pair."""
    increments: Dict[str, List[float]] = {}
    for small, large in zip(boxes, boxes[1:]):
        for name, value in small.probes.items():
            if name in large.probes:
                increments.setdefault(name, []).append(large.probes[name] - value)
    return increments
