"""Small and semismall perturbation functionals over exhaustion tails.

For a tail T_k = {k < |z|_inf <= K} of the ambient box the functionals are

    small:              sup_{x,y ∈ T_k}  Σ_{z ∈ T_k} G(x,z)|V(z)|G(z,y)ν(z) / G(x,y)
    semismall:          sup_{y ∈ T_k}    Σ_{z ∈ T_k} G(x0,z)|V(z)|G(z,y)ν(z) / G(x0,y)
    semismall_adjoint:  sup_{x ∈ T_k}    Σ_{z ∈ T_k} G(x,z)|V(z)|G(z,x0)ν(z) / G(x,x0)

with G the Green function of the unshifted operator on the ambient box.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as la

from ..configuration import UnifiedConfig, get_unified_config
from ..error import ExclusionTooLarge, NotSubcritical, PerturbationError, TailEmpty
from ..green.kernels import GreenSolver, lambda0_lower_bound, principal_pair
from ..lattice.domain import Exhaustion
from ..lattice.fields import FieldDescription, FieldSpec, parse_field
from ..observability import get_logger
from ..operators.assembly import AssembledOperator, OperatorSpec, assemble, shift

MODES = ("small", "semismall", "semismall_adjoint")


@dataclass(frozen=True)
class TruncationRow:
    radius: int
    full: float
    half: float

    @property
    def relative(self) -> float:
        scale = max(abs(self.full), abs(self.half))
        return abs(self.full - self.half) / scale if scale > 0 else 0.0


@dataclass(frozen=True)
class PerturbationProfile:
    """S(k) over the exhaustion radii for one mode."""

    mode: str
    radii: Tuple[int, ...]
    values: Tuple[float, ...]
    ambient_radius: int
    verdict: str
    skipped: Optional[str] = None
    truncation: Tuple[TruncationRow, ...] = field(default_factory=tuple)
    truncation_ambient: Optional[int] = None

    @property
    def decay_ratio(self) -> Optional[float]:
        if not self.values or self.values[0] == 0.0:
            return None
        return self.values[-1] / self.values[0]

    def truncation_flags(self, rel: float) -> List[int]:
        return [row.radius for row in self.truncation if row.relative > rel]

    def rows(self) -> List[Dict[str, Any]]:
        return [
            {"mode": self.mode, "k": k, "S_k": s, "verdict": self.verdict}
            for k, s in zip(self.radii, self.values)
        ]


def decay_verdict(values: Sequence[float], ratio: float = 0.5) -> str:
    """"vanishing" for S ≡ 0, "decaying" when S(k_M) < ratio·S(k_1) with the last two steps negative."""
    if all(v == 0.0 for v in values):
        return "vanishing"
    steps = [b - a for a, b in zip(values, values[1:])]
    if len(steps) >= 2 and values[-1] < ratio * values[0] and steps[-1] < 0 and steps[-2] < 0:
        return "decaying"
    return "not_decaying"


def _potential(spec: OperatorSpec, V: Optional[FieldDescription]) -> FieldSpec:
    if V is None:
        return spec.W
    return V if isinstance(V, FieldSpec) else parse_field(V, "node")


def require_subcritical(
    spec: OperatorSpec, ex: Exhaustion, config: UnifiedConfig, boxes: Sequence[int]
) -> Dict[int, float]:
    """λ0^{(k)} for the given boxes; NotSubcritical when any is ≤ 0.

    Boxes above ``direct_node_limit`` are first tried with the Collatz-Wielandt
    bound at v ≡ 1; a positive bound certifies λ0^{(k)} > 0 and is returned
    in place of the eigenvalue.
    """
    values: Dict[int, float] = {}
    for k in boxes:
        op = assemble(spec, ex, k)
        if op.n > config.solver.direct_node_limit:
            bound = lambda0_lower_bound(op)
            if bound > 0:
                values[k] = bound
                continue
        value = principal_pair(op, anchor=ex.anchor, config=config.solver).eigenvalue
        values[k] = value
        if value <= 0:
            raise NotSubcritical(
                f"Operator is not subcritical on box {k} (λ0 = {value!r})",
                {"radius": k, "lambda0_k": value},
            )
    return values


class _TailFunctional:
    """Green data of one ambient box, shared by every radius and mode."""

    def __init__(
        self, op: AssembledOperator, ex: Exhaustion, potential: FieldSpec, config: UnifiedConfig
    ):
        self.op = op
        self.solver = GreenSolver(op, config=config.solver)
        coords = op.nodes.coords
        self.sup = op.nodes.sup_norm
        self.density = np.abs(potential.evaluate(coords)) * op.nu
        self.anchor = ex.anchor
        self._row: Optional[np.ndarray] = None
        self._column: Optional[np.ndarray] = None
        self._dense: Optional[np.ndarray] = None

    def tail(self, k: int) -> np.ndarray:
        mask = self.sup > k
        if not mask.any():
            raise TailEmpty(
                f"Tail beyond radius {k} is empty inside the ambient box {self.op.radius}",
                {"radius": k, "ambient_radius": self.op.radius},
            )
        return mask

    @property
    def row(self) -> np.ndarray:
        if self._row is None:
            self._row = self.solver.row(self.anchor)
        return self._row

    @property
    def column(self) -> np.ndarray:
        if self._column is None:
            self._column = self.solver.column(self.anchor)
        return self._column

    def semismall(self, k: int) -> float:
        mask = self.tail(k)
        r = self.row
        q = np.where(mask, r * self.density, 0.0)
        if not q.any():
            return 0.0
        w = self.solver.solve(q, transpose=True)
        return float((w[mask] / r[mask]).max())

    def semismall_adjoint(self, k: int) -> float:
        mask = self.tail(k)
        c = self.column
        q = np.where(mask, c * self.density, 0.0)
        if not q.any():
            return 0.0
        w = self.solver.solve(q)
        return float((w[mask] / c[mask]).max())

    def small(self, k: int) -> float:
        mask = self.tail(k)
        if self._dense is None:
            self._dense = la.inv(self.op.dense_stiffness())
        block = self._dense[np.ix_(mask, mask)]
        v = self.density[mask]
        if not v.any():
            return 0.0
        numerator = (block * v[None, :]) @ block
        return float((numerator / block).max())


def smallness_profile(
    spec: OperatorSpec,
    ex: Exhaustion,
    V: Optional[FieldDescription] = None,
    mode: str = "semismall",
    config: Optional[UnifiedConfig] = None,
    check_subcritical: bool = True,
) -> PerturbationProfile:
    """S(k) for every exhaustion radius, plus the half-ambient truncation comparison."""
    profiles = smallness_profiles(spec, ex, V, (mode,), config, check_subcritical)
    return profiles[mode]


def smallness_profiles(
    spec: OperatorSpec,
    ex: Exhaustion,
    V: Optional[FieldDescription] = None,
    modes: Sequence[str] = MODES,
    config: Optional[UnifiedConfig] = None,
    check_subcritical: bool = True,
) -> Dict[str, PerturbationProfile]:
    cfg = config or get_unified_config()
    unknown = [m for m in modes if m not in MODES]
    if unknown:
        raise PerturbationError(
            f"Unknown perturbation mode(s): {', '.join(unknown)}",
            "UNKNOWN_MODE",
            {"modes": list(unknown)},
        )
    ambient = ex.ambient_radius
    for k in ex.radii:
        if k >= ambient:
            raise TailEmpty(
                f"Tail beyond radius {k} is empty inside the ambient box {ambient}",
                {"radius": k, "ambient_radius": ambient},
            )
    if check_subcritical:
        require_subcritical(spec, ex, cfg, tuple(ex.radii) + (ambient,))

    potential = _potential(spec, V)
    half = int(round(ambient / 2))
    tails = {ambient: _TailFunctional(assemble(spec, ex, ambient), ex, potential, cfg)}
    half_radii = [k for k in ex.radii if k < half]
    if half_radii and half < ambient:
        tails[half] = _TailFunctional(assemble(spec, ex, half), ex, potential, cfg)

    logger = get_logger()
    profiles: Dict[str, PerturbationProfile] = {}
    for mode in modes:
        full = tails[ambient]
        if mode == "small" and full.op.n > cfg.solver.small_mode_node_limit:
            profiles[mode] = PerturbationProfile(
                mode=mode,
                radii=tuple(ex.radii),
                values=(),
                ambient_radius=ambient,
                verdict="skipped",
                skipped=f"ambient box has {full.op.n} nodes (limit {cfg.solver.small_mode_node_limit})",
            )
            continue
        evaluate = getattr(full, mode)
        values = tuple(evaluate(k) for k in ex.radii)
        truncation: Tuple[TruncationRow, ...] = ()
        if half in tails and half != ambient:
            partial = getattr(tails[half], mode)
            truncation = tuple(
                TruncationRow(radius=k, full=s, half=partial(k))
                for k, s in zip(ex.radii, values)
                if k in half_radii
            )
        profile = PerturbationProfile(
            mode=mode,
            radii=tuple(ex.radii),
            values=values,
            ambient_radius=ambient,
            verdict=decay_verdict(values),
            truncation=truncation,
            truncation_ambient=half if truncation else None,
        )
        logger.log_check(
            f"perturbation.{mode}",
            passed=profile.verdict in ("decaying", "vanishing"),
            value=profile.decay_ratio,
            diagnostic=True,
        )
        profiles[mode] = profile
    return profiles


def mode_ordering(profiles: Dict[str, PerturbationProfile]) -> Optional[float]:
    """max_k (S_semismall(k) - S_small(k)); ≤ 0 when the ordering holds."""
    small = profiles.get("small")
    semi = profiles.get("semismall")
    if small is None or semi is None or not small.values or not semi.values:
        return None
    return max(b - a for a, b in zip(small.values, semi.values))


@dataclass(frozen=True)
class ComparabilityRow:
    radius: int
    phi_vs_shifted: float
    base_vs_shifted: Optional[float]


@dataclass(frozen=True)
class ComparabilityReport:
    """Empirical comparability constants per box and their last relative change."""

    shift: float
    exclusion: float
    reference: Tuple[int, ...]
    rows: Tuple[ComparabilityRow, ...]

    @property
    def growth(self) -> Optional[float]:
        if len(self.rows) < 2:
            return None
        a, b = self.rows[-2].phi_vs_shifted, self.rows[-1].phi_vs_shifted
        return (b - a) / a

    def stabilized(self, rel: float = 0.10) -> Optional[bool]:
        growth = self.growth
        return None if growth is None else abs(growth) <= rel

    def to_dict(self) -> Dict[str, Any]:
        return {
            "shift": self.shift,
            "exclusion": self.exclusion,
            "reference": list(self.reference),
            "growth": self.growth,
            "rows": [
                {"k": r.radius, "C_phi": r.phi_vs_shifted, "C_base": r.base_vs_shifted}
                for r in self.rows
            ],
        }


def comparability_constant(
    f: np.ndarray,
    g: np.ndarray,
    coords: np.ndarray,
    x0: Sequence[int],
    exclusion: float,
    reference: int,
) -> float:
    """max over |x - x0|_inf > ε of max(f/g, g/f) after matching f and g at ``reference``."""
    distance = np.abs(coords - np.asarray(x0)[None, :]).max(axis=1)
    keep = distance > exclusion
    if not keep.any():
        raise ExclusionTooLarge(
            f"No nodes remain beyond distance {exclusion} from {list(x0)}",
            {"exclusion": exclusion, "anchor": list(x0)},
        )
    a = f[keep] / f[reference]
    b = g[keep] / g[reference]
    return float(np.maximum(a / b, b / a).max())


def comparability_check(
    spec: OperatorSpec,
    ex: Exhaustion,
    lam: float,
    exclusion: float = 1.0,
    config: Optional[UnifiedConfig] = None,
) -> ComparabilityReport:
    """Compare G_{L_λ}(·, x0) with φ and with G_L(·, x0) on every exhaustion box.

    φ is the principal eigenfunction of the largest box restricted to each box;
    all three are matched at the corner node of the smallest box.
    """
    cfg = config or get_unified_config()
    x0 = ex.anchor
    reference_node = tuple([ex.radii[0]] * ex.dimension)
    largest = assemble(spec, ex, ex.radii[-1])
    largest_pair = principal_pair(largest, anchor=x0, config=cfg.solver)
    phi_largest = largest_pair.phi
    largest_rows = ex.box_rows(ex.radii[-1])

    rows: List[ComparabilityRow] = []
    for k in ex.radii:
        if k == ex.radii[-1]:
            op, pair = largest, largest_pair
        else:
            op = assemble(spec, ex, k)
            pair = principal_pair(op, anchor=x0, config=cfg.solver)
        shifted = shift(op, lam)
        g_shift = GreenSolver(shifted, principal=pair, config=cfg.solver).column(x0)
        g_base = None
        if pair.eigenvalue > 0:
            g_base = GreenSolver(op, principal=pair, config=cfg.solver).column(x0)
        phi = phi_largest[np.searchsorted(largest_rows, ex.box_rows(k))]
        reference = op.row(reference_node)
        coords = op.nodes.coords
        rows.append(
            ComparabilityRow(
                radius=k,
                phi_vs_shifted=comparability_constant(phi, g_shift, coords, x0, exclusion, reference),
                base_vs_shifted=(
                    comparability_constant(g_base, g_shift, coords, x0, exclusion, reference)
                    if g_base is not None
                    else None
                ),
            )
        )
    return ComparabilityReport(
        shift=lam,
        exclusion=exclusion,
        reference=reference_node,
        rows=tuple(rows),
    )

