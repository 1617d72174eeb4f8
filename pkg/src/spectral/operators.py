"""Weighted Green operators 𝒢_λ, 𝒢_λ^⊙ and their dense spectra."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as la
from scipy.spatial import cKDTree

from ..configuration import SolverConfig, get_unified_config
from ..error import DegenerateTopEigenvalue, DenseLimitExceeded, NonPositiveKernel
from ..green.kernels import GreenKernel, dirichlet_green, principal_pair
from ..lattice.domain import Exhaustion
from ..observability import get_logger
from ..operators.assembly import AssembledOperator, OperatorSpec, assemble, shift


@dataclass(frozen=True, eq=False)
class GreenOperator:
    """(𝒢f)(x) = Σ_y G(x,y) W(y) f(y) ν(y) and its dual kernel on one box."""

    radius: int
    shift: float
    kernel: np.ndarray
    dual_kernel: np.ndarray
    green: GreenKernel
    operator: Optional[AssembledOperator] = field(default=None, repr=False)
    duality_defect: float = 0.0

    @property
    def n(self) -> int:
        return self.kernel.shape[0]

    @property
    def weight(self) -> np.ndarray:
        return self.green.weight

    @property
    def nu(self) -> np.ndarray:
        return self.green.nu

    @property
    def symmetric(self) -> bool:
        G = self.green.matrix
        return bool(np.allclose(G, G.T, rtol=1e-13, atol=0.0))

    def apply(self, f: np.ndarray) -> np.ndarray:
        return self.kernel @ f

    def apply_dual(self, g: np.ndarray) -> np.ndarray:
        return self.dual_kernel @ g


def _duality_defect(
    kernel: np.ndarray,
    dual_kernel: np.ndarray,
    wn: np.ndarray,
    rng: np.random.Generator,
    pairs: int,
) -> float:
    worst = 0.0
    for _ in range(pairs):
        f = rng.uniform(-1.0, 1.0, kernel.shape[0])
        g = rng.uniform(-1.0, 1.0, kernel.shape[0])
        terms = g * wn * (kernel @ f)
        left = float(np.sum(terms))
        right = float(np.sum((dual_kernel @ g) * wn * f))
        # Both sides sum the same products; roundoff scales with Σ|terms|.
        scale = max(float(np.abs(terms).sum()), 1e-300)
        worst = max(worst, abs(left - right) / scale)
    return worst


def green_operator(
    green: GreenKernel,
    op: Optional[AssembledOperator] = None,
    pairs: int = 50,
    seed: Optional[int] = None,
) -> GreenOperator:
    """Materialize K = G D_{Wν} and K^⊙ = Gᵀ D_{Wν}; the duality defect is measured once."""
    if not green.min_entry > 0:
        raise NonPositiveKernel(
            f"Green kernel of box {green.radius} is not positive",
            {"radius": green.radius, "min_entry": green.min_entry},
        )
    wn = green.weight * green.nu
    kernel = green.matrix * wn[None, :]
    dual_kernel = green.matrix.T * wn[None, :]
    seed = get_unified_config().solver.random_seed if seed is None else seed
    defect = _duality_defect(kernel, dual_kernel, wn, np.random.default_rng(seed), pairs)
    return GreenOperator(
        radius=green.radius,
        shift=green.shift,
        kernel=kernel,
        dual_kernel=dual_kernel,
        green=green,
        operator=op,
        duality_defect=defect,
    )


def build_green_operator(
    spec: OperatorSpec,
    ex: Exhaustion,
    k: int,
    lam: float,
    config: Optional[SolverConfig] = None,
) -> GreenOperator:
    """Assemble, shift and invert on one box."""
    op = assemble(spec, ex, k)
    pair = principal_pair(op, anchor=ex.anchor, config=config)
    shifted = shift(op, lam)
    return green_operator(dirichlet_green(shifted, principal=pair, config=config), shifted)


@dataclass(frozen=True, eq=False)
class SpectralReport:
    """Dense spectrum of 𝒢_λ on one box with Perron-structure diagnostics."""

    radius: int
    shift: float
    eigenvalues: np.ndarray
    top: complex
    top_vector: np.ndarray
    gap: float
    multiplicity: int
    sign_definite: bool
    min_modulus: float
    pde_residual: float
    dual_defect: float
    conjugation_defect: float
    method: str
    expected_top: Optional[float] = None
    norms: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    gelfand: Dict[str, float] = field(default_factory=dict)

    @property
    def top_real(self) -> bool:
        return abs(self.top.imag) <= 1e-10 * max(1.0, abs(self.top))

    @property
    def top_defect(self) -> Optional[float]:
        """|η_max - (μ-λ)^{-1}| relative to the expected value."""
        if self.expected_top is None:
            return None
        return abs(self.top - self.expected_top) / abs(self.expected_top)

    def is_degenerate(self, gap_tol: float) -> bool:
        return (
            not self.top_real
            or self.multiplicity > 1
            or self.gap <= gap_tol
            or not self.sign_definite
        )

    def raise_for_degeneracy(self, gap_tol: float) -> None:
        if self.is_degenerate(gap_tol):
            raise DegenerateTopEigenvalue(
                f"Top eigenvalue of box {self.radius} is not a simple real Perron eigenvalue",
                {
                    "radius": self.radius,
                    "top": [self.top.real, self.top.imag],
                    "gap": self.gap,
                    "multiplicity": self.multiplicity,
                    "sign_definite": self.sign_definite,
                },
            )

    def with_tables(
        self,
        norms: Optional[Dict[str, Dict[str, Any]]] = None,
        gelfand: Optional[Dict[str, float]] = None,
    ) -> "SpectralReport":
        return replace(
            self,
            norms={**self.norms, **(norms or {})},
            gelfand={**self.gelfand, **(gelfand or {})},
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "radius": self.radius,
            "shift": self.shift,
            "method": self.method,
            "eigenvalues": [[float(e.real), float(e.imag)] for e in self.eigenvalues],
            "top": [float(self.top.real), float(self.top.imag)],
            "expected_top": self.expected_top,
            "top_defect": self.top_defect,
            "gap": self.gap,
            "multiplicity": self.multiplicity,
            "sign_definite": self.sign_definite,
            "min_modulus": self.min_modulus,
            "pde_residual": self.pde_residual,
            "dual_defect": self.dual_defect,
            "conjugation_defect": self.conjugation_defect,
            "norms": self.norms,
            "gelfand": self.gelfand,
        }


def _order(values: np.ndarray) -> np.ndarray:
    # Descending modulus; ties broken by real then imaginary part.
    return np.lexsort((-values.imag, -values.real, -np.abs(values)))


def _spectrum_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance of two eigenvalue sets, relative to max |a|."""
    pa = np.column_stack((a.real, a.imag))
    pb = np.column_stack((b.real, b.imag))
    forward = cKDTree(pb).query(pa)[0].max()
    backward = cKDTree(pa).query(pb)[0].max()
    scale = max(float(np.abs(a).max()), 1e-300)
    return float(max(forward, backward)) / scale


def _stiffness(opr: GreenOperator) -> np.ndarray:
    if opr.operator is not None:
        return opr.operator.dense_stiffness()
    return la.inv(opr.green.matrix)


def spectrum(
    opr: GreenOperator,
    expected_top: Optional[float] = None,
    config: Optional[SolverConfig] = None,
) -> SpectralReport:
    """Full eigen-decomposition of K with simplicity, sign and residual checks."""
    cfg = config or get_unified_config().solver
    if opr.n > cfg.spectrum_node_limit:
        raise DenseLimitExceeded(
            f"Box {opr.radius} has {opr.n} nodes, above the spectrum limit {cfg.spectrum_node_limit}",
            {"radius": opr.radius, "n": opr.n},
        )
    started = time.perf_counter()
    wn = opr.weight * opr.nu
    if opr.symmetric:
        # K = G D is similar to the symmetric D^{1/2} G D^{1/2}.
        root = np.sqrt(wn)
        sym = root[:, None] * opr.green.matrix * root[None, :]
        values, vectors = la.eigh(sym)
        vectors = vectors / root[:, None]
        values = values.astype(complex)
        dual_values = values.copy()
        method = "dense_symmetric"
    else:
        values, vectors = la.eig(opr.kernel)
        dual_values = la.eigvals(opr.dual_kernel)
        method = "dense_general"

    order = _order(values)
    values = values[order]
    vectors = vectors[:, order]
    top = complex(values[0])
    moduli = np.abs(values)
    gap = float(moduli[0] - moduli[1]) if values.size > 1 else float(moduli[0])

    cluster = np.flatnonzero(np.abs(values - top) <= 1e-8 * abs(top))
    multiplicity = 1
    if cluster.size > 1:
        singular = la.svdvals(opr.kernel - top * np.eye(opr.n))
        multiplicity = int(np.sum(singular <= 1e-8 * abs(top)))

    v = vectors[:, 0]
    v = v / v[np.argmax(np.abs(v))]
    sign_definite = bool(np.abs(v.imag).max() <= 1e-8 and v.real.min() * v.real.max() > 0)

    # (M_λ - η^{-1} B) v = 0 for every eigenpair, measured in the L = D_ν^{-1} M form.
    M = _stiffness(opr)
    lhs = (M @ vectors - (wn[:, None] * vectors) / values[None, :]) / opr.nu[:, None]
    scale = np.abs(M / opr.nu[:, None]).sum(axis=1).max() * np.abs(vectors).max(axis=0)
    pde_residual = float((np.abs(lhs).max(axis=0) / scale).max())

    conjugation = _spectrum_distance(values, np.conj(values))
    dual_defect = _spectrum_distance(values, np.asarray(dual_values, dtype=complex))

    get_logger().log_solve(
        "spectrum", radius=opr.radius, n=opr.n, shift=opr.shift,
        seconds=time.perf_counter() - started,
    )
    return SpectralReport(
        radius=opr.radius,
        shift=opr.shift,
        eigenvalues=values,
        top=top,
        top_vector=v.real if sign_definite else v,
        gap=gap,
        multiplicity=multiplicity,
        sign_definite=sign_definite,
        min_modulus=float(moduli.min()),
        pde_residual=pde_residual,
        dual_defect=dual_defect,
        conjugation_defect=conjugation,
        method=method,
        expected_top=expected_top,
    )


def eigen_identity_defect(opr: GreenOperator, phi: np.ndarray, eigenvalue: float) -> float:
    """‖𝒢_λ φ - φ/(λ0 - λ)‖_∞ / ‖φ/(λ0 - λ)‖_∞."""
    target = phi / (eigenvalue - opr.shift)
    return float(np.abs(opr.apply(phi) - target).max() / np.abs(target).max())


@dataclass(frozen=True)
class SpectrumStability:
    """Leading moduli of 𝒢_λ per box and their increments in k."""

    radii: Tuple[int, ...]
    leading: Tuple[Tuple[complex, ...], ...]
    increments: Tuple[float, ...]
    ratios: Tuple[float, ...]

    @property
    def worst_ratio(self) -> Optional[float]:
        return max(self.ratios) if self.ratios else None

    def is_cauchy(self, ratio: float) -> bool:
        return bool(self.ratios) and all(r < ratio for r in self.ratios)


def leading_spectrum_stability(
    spec: OperatorSpec,
    ex: Exhaustion,
    lam: float,
    radii: Sequence[int],
    count: int = 5,
    config: Optional[SolverConfig] = None,
) -> SpectrumStability:
    """Top ``count`` eigenvalues of 𝒢_λ on each box; increments are sup over the list."""
    cfg = config or get_unified_config().solver
    leading: List[np.ndarray] = []
    for k in radii:
        opr = build_green_operator(spec, ex, k, lam, cfg)
        values = la.eigvals(opr.kernel)
        leading.append(values[_order(values)][:count])

    increments = []
    for a, b in zip(leading, leading[1:]):
        m = min(a.size, b.size)
        increments.append(float(np.abs(b[:m] - a[:m]).max()))
    ratios = tuple(
        b / a if a > 0 else float("inf") for a, b in zip(increments, increments[1:])
    )
    return SpectrumStability(
        radii=tuple(int(k) for k in radii),
        leading=tuple(tuple(complex(v) for v in row) for row in leading),
        increments=tuple(increments),
        ratios=ratios,
    )

