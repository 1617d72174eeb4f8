"""Weighted Lebesgue spaces L^p(φ_p) built from a positive pair (φ, φ̃).

The weights are ``φ_p = φ^{-1} (φ W φ̃)^{1/p}`` and the dual weights
``φ̃_{p'} = φ̃^{-1} (φ W φ̃)^{1/p'}``. Their product is ``W``, so the pairing
``⟨g, f⟩ = Σ g W f ν`` is the plain ν-duality of ``g φ̃_{p'}`` and ``f φ_p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..error import ExponentOutOfRange, NonPositiveInput, NotNormalized

Exponent = Union[float, int, str]

_NORMALIZED_REL = 1e-10


def parse_exponent(p: Exponent) -> float:
    """Exponent as a float in [1, inf]; the strings "inf"/"∞" map to math.inf."""
    if isinstance(p, str):
        text = p.strip().lower()
        if text in ("inf", "infinity", "∞"):
            return math.inf
        try:
            value = float(text)
        except ValueError as exc:
            raise ExponentOutOfRange(f"Cannot read exponent '{p}'", {"p": p}) from exc
    else:
        value = float(p)
    if math.isnan(value) or value < 1.0:
        raise ExponentOutOfRange(f"Exponent must lie in [1, inf], got {p!r}", {"p": p})
    return value


def conjugate(p: Exponent) -> float:
    """p' with 1/p + 1/p' = 1."""
    p = parse_exponent(p)
    if p == 1.0:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def exponent_key(p: Exponent) -> str:
    """Stable report key: "1", "1.5", "2", "3", "inf"."""
    p = parse_exponent(p)
    if math.isinf(p):
        return "inf"
    return str(int(p)) if p.is_integer() else repr(p)


def _require_positive(name: str, values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    bad = np.flatnonzero(~(values > 0))
    if bad.size:
        raise NonPositiveInput(
            f"{name} must be positive, violated at index {int(bad[0])}",
            {"input": name, "index": int(bad[0]), "value": float(values[bad[0]])},
        )
    return values


@dataclass(frozen=True, eq=False)
class WeightedSpace:
    """L^p(φ_p) on one box together with its dual weight φ̃_{p'}."""

    p: float
    phi: np.ndarray
    phi_tilde: np.ndarray
    weight: np.ndarray
    nu: np.ndarray
    weights: np.ndarray
    dual_weights: np.ndarray
    mass: float
    normalized: bool

    @property
    def conjugate(self) -> float:
        return conjugate(self.p)

    @property
    def key(self) -> str:
        return exponent_key(self.p)

    @property
    def density(self) -> np.ndarray:
        """ρ = φ W φ̃."""
        return self.phi * self.weight * self.phi_tilde

    def norm(self, f: np.ndarray) -> float:
        return weighted_norm(f, self)

    def dual_norm(self, g: np.ndarray) -> float:
        """‖g‖ in L^{p'}(φ̃_{p'})."""
        return _lebesgue_norm(np.asarray(g, dtype=float) * self.dual_weights, self.nu, self.conjugate)

    def dual(self) -> "WeightedSpace":
        """L^{p'}(φ̃_{p'}): the same construction with φ and φ̃ exchanged."""
        return make_weights(self.phi_tilde, self.phi, self.weight, self.nu, self.conjugate)


def make_weights(
    phi: np.ndarray,
    phi_tilde: np.ndarray,
    weight: np.ndarray,
    nu: np.ndarray,
    p: Exponent,
    normalize: bool = False,
) -> WeightedSpace:
    """Build φ_p and φ̃_{p'}; with ``normalize`` φ̃ is rescaled so Σ φWφ̃ν = 1."""
    p = parse_exponent(p)
    phi = _require_positive("phi", phi)
    phi_tilde = _require_positive("phi_tilde", phi_tilde)
    weight = _require_positive("W", weight)
    nu = _require_positive("nu", nu)

    mass = float(np.sum(phi * weight * phi_tilde * nu))
    if normalize:
        phi_tilde = phi_tilde / mass
        mass = 1.0
    density = phi * weight * phi_tilde
    q = conjugate(p)
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    inv_q = 0.0 if math.isinf(q) else 1.0 / q
    weights = density**inv_p / phi
    dual_weights = density**inv_q / phi_tilde
    return WeightedSpace(
        p=p,
        phi=phi,
        phi_tilde=phi_tilde,
        weight=weight,
        nu=nu,
        weights=weights,
        dual_weights=dual_weights,
        mass=mass,
        normalized=abs(mass - 1.0) <= _NORMALIZED_REL,
    )


def weight_family(
    phi: np.ndarray,
    phi_tilde: np.ndarray,
    weight: np.ndarray,
    nu: np.ndarray,
    exponents: Iterable[Exponent],
    normalize: bool = True,
) -> Tuple[WeightedSpace, ...]:
    """Spaces for several exponents sharing one normalization, ordered by p."""
    ps = sorted({parse_exponent(p) for p in exponents})
    if normalize:
        mass = float(np.sum(phi * weight * phi_tilde * nu))
        phi_tilde = np.asarray(phi_tilde, dtype=float) / mass
    return tuple(make_weights(phi, phi_tilde, weight, nu, p) for p in ps)


def _lebesgue_norm(u: np.ndarray, nu: np.ndarray, p: float) -> float:
    if math.isinf(p):
        return float(np.abs(u).max()) if u.size else 0.0
    if p == 1.0:
        return float(np.sum(np.abs(u) * nu))
    # Scale by the max to keep |u|^p finite for large p.
    scale = float(np.abs(u).max()) if u.size else 0.0
    if scale == 0.0:
        return 0.0
    return scale * float(np.sum((np.abs(u) / scale) ** p * nu)) ** (1.0 / p)


def weighted_norm(f: np.ndarray, space: WeightedSpace) -> float:
    """‖f‖_{p,φ_p} = ‖f φ_p‖_{L^p(ν)}."""
    return _lebesgue_norm(np.asarray(f, dtype=float) * space.weights, space.nu, space.p)


def pairing(g: np.ndarray, f: np.ndarray, weight: np.ndarray, nu: np.ndarray) -> float:
    """Bilinear ⟨g, f⟩ = Σ g W f ν."""
    return float(np.sum(np.asarray(g) * weight * np.asarray(f) * nu))


def holder_gap(g: np.ndarray, f: np.ndarray, space: WeightedSpace) -> float:
    """‖g‖_{p'} ‖f‖_p - |⟨g, f⟩|, nonnegative up to roundoff."""
    return space.dual_norm(g) * space.norm(f) - abs(pairing(g, f, space.weight, space.nu))


def dual_extremal(f: np.ndarray, space: WeightedSpace) -> np.ndarray:
    """g with ‖g‖_{p',φ̃_{p'}} = 1 attaining ⟨g, f⟩ = ‖f‖_{p,φ_p} (zero for f = 0)."""
    u = np.asarray(f, dtype=float) * space.weights
    g = np.zeros_like(u)
    norm = _lebesgue_norm(u, space.nu, space.p)
    if norm == 0.0:
        return g
    if math.isinf(space.p):
        j = int(np.argmax(np.abs(u)))
        g[j] = np.sign(u[j]) / space.nu[j]
    elif space.p == 1.0:
        g = np.sign(u)
    else:
        g = np.sign(u) * (np.abs(u) / norm) ** (space.p - 1.0)
    return g / space.dual_weights


def dual_norm_gap(
    f: np.ndarray, space: WeightedSpace, rng: np.random.Generator, samples: int = 100
) -> Tuple[float, float]:
    """(|attained - ‖f‖|, max over random unit-ball g of ⟨g, f⟩ - ‖f‖).

    The first entry measures the extremal; the second must stay ≤ 0.
    """
    norm = space.norm(f)
    attained = pairing(dual_extremal(f, space), f, space.weight, space.nu)
    excess = -math.inf
    for _ in range(samples):
        g = rng.standard_normal(f.shape)
        size = space.dual_norm(g)
        if size == 0.0:
            continue
        excess = max(excess, pairing(g / size, f, space.weight, space.nu) - norm)
    return abs(attained - norm), excess


@dataclass(frozen=True)
class EmbeddingChain:
    """p ↦ ‖f‖_{p,φ_p} over an ordered family of normalized spaces."""

    keys: Tuple[str, ...]
    norms: Tuple[float, ...]
    violations: Tuple[Tuple[str, str, float], ...]
    proportional: Optional[bool] = None

    @property
    def holds(self) -> bool:
        return not self.violations

    @property
    def min_increment(self) -> float:
        steps = [b - a for a, b in zip(self.norms, self.norms[1:])]
        return min(steps) if steps else 0.0


def embedding_chain(
    f: np.ndarray, spaces: Sequence[WeightedSpace], slack: float = 1e-12
) -> EmbeddingChain:
    """Check ‖f‖_{p,φ_p} ≤ ‖f‖_{q,φ_q} for consecutive p ≤ q.

    When the endpoints p = 1 and p = ∞ are both present and agree, the
    chain also reports whether |f| is a constant multiple of φ.
    """
    for space in spaces:
        if not space.normalized:
            raise NotNormalized(
                f"Space with p={space.key} has Σ φWφ̃ν = {space.mass!r}, expected 1",
                {"p": space.key, "mass": space.mass},
            )
    ordered = sorted(spaces, key=lambda s: s.p)
    norms = [s.norm(f) for s in ordered]
    violations: List[Tuple[str, str, float]] = []
    for (a, na), (b, nb) in zip(zip(ordered, norms), zip(ordered[1:], norms[1:])):
        scale = max(1.0, abs(nb))
        if nb - na < -slack * scale:
            violations.append((a.key, b.key, nb - na))

    proportional = None
    if ordered and ordered[0].p == 1.0 and math.isinf(ordered[-1].p):
        first, last = norms[0], norms[-1]
        if last > 0 and abs(first - last) <= 1e-10 * last:
            ratio = np.abs(np.asarray(f, dtype=float)) / ordered[0].phi
            proportional = bool(np.ptp(ratio) <= 1e-10 * max(1.0, float(ratio.max())))

    return EmbeddingChain(
        keys=tuple(s.key for s in ordered),
        norms=tuple(norms),
        violations=tuple(violations),
        proportional=proportional,
    )


def random_chain_defect(
    spaces: Sequence[WeightedSpace], rng: np.random.Generator, samples: int = 100
) -> float:
    """Worst (most negative) increment of p ↦ ‖f‖ over random sign-mixed f."""
    n = spaces[0].phi.shape[0]
    worst = math.inf
    for _ in range(samples):
        f = rng.standard_normal(n) * spaces[0].phi
        worst = min(worst, embedding_chain(f, spaces, slack=math.inf).min_increment)
    return worst
