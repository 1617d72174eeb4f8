"""Assembly of the discrete divergence-form operator on a lattice box.

The operator is stored in stiffness form ``L = D_ν^{-1} M`` with

    M = S_a + P_b + P_b̃ᵀ + D_{cν}

where ``S_a`` is the conductance Laplacian, ``P_f`` the centered advection
matrix of an edge field ``f`` and ``P_fᵀ`` its flux counterpart. Exterior
nodes carry the Dirichlet value 0. The formal adjoint is ``L* = D_ν^{-1} Mᵀ``,
which is the same operator with ``b`` and ``b̃`` exchanged.

A spectral shift ``L_λ = L - λW`` changes the stiffness to ``M - λ D_{Wν}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from ..error import (
    AssemblyError,
    DriftTooStrong,
    NonPositiveConductance,
    NonPositiveTransformFunction,
    SpecDomainMismatch,
)
from ..lattice.domain import Exhaustion, NodeSet
from ..lattice.fields import FieldDescription, FieldSpec, parse_field, spec_hash
from ..observability import get_logger


@dataclass(frozen=True)
class OperatorSpec:
    """Coefficient fields of L: conductance a, drifts b and b̃, potential c, weight W."""

    a: FieldSpec
    b: FieldSpec
    b_tilde: FieldSpec
    c: FieldSpec
    W: FieldSpec

    @classmethod
    def from_descriptions(
        cls,
        a: FieldDescription = "unit",
        b: FieldDescription = 0.0,
        b_tilde: FieldDescription = 0.0,
        c: FieldDescription = 0.0,
        W: FieldDescription = "unit",
    ) -> "OperatorSpec":
        return cls(
            a=parse_field(a, "edge"),
            b=parse_field(b, "edge"),
            b_tilde=parse_field(b_tilde, "edge"),
            c=parse_field(c, "node"),
            W=parse_field(W, "node"),
        )

    @property
    def symmetric_case(self) -> bool:
        """True iff b and b̃ have the same description."""
        return self.b.canonical == self.b_tilde.canonical

    @property
    def hash(self) -> str:
        return spec_hash(
            {"a": self.a, "b": self.b, "b_tilde": self.b_tilde, "c": self.c, "W": self.W}
        )

    def adjoint(self) -> "OperatorSpec":
        """Operator description of the formal adjoint L* (drift slots exchanged)."""
        return replace(self, b=self.b_tilde, b_tilde=self.b)

    def with_potential(self, c: FieldDescription) -> "OperatorSpec":
        return replace(self, c=parse_field(c, "node"))

    def describe(self) -> Dict[str, Any]:
        return {
            "a": self.a.canonical,
            "b": self.b.canonical,
            "b_tilde": self.b_tilde.canonical,
            "c": self.c.canonical,
            "W": self.W.canonical,
        }


@dataclass(frozen=True, eq=False)
class AssembledOperator:
    """Matrices of L_λ and L*_λ on the interior of one box (Dirichlet exterior)."""

    radius: int
    nodes: NodeSet
    stiffness: sp.csr_matrix
    nu: np.ndarray
    weight: np.ndarray
    shift: float = 0.0
    spec_hash: str = ""
    symmetric: bool = False
    transform: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.nodes.n

    @property
    def weight_measure(self) -> np.ndarray:
        """Diagonal of B = D_{Wν}, the mass matrix of the eigenpencil (M, B)."""
        return self.weight * self.nu

    @property
    def matrix(self) -> sp.csr_matrix:
        """L_λ = D_ν^{-1} M_λ."""
        return sp.diags(1.0 / self.nu) @ self.stiffness

    @property
    def adjoint_stiffness(self) -> sp.csr_matrix:
        return self.stiffness.T.tocsr()

    @property
    def adjoint_matrix(self) -> sp.csr_matrix:
        """L*_λ = D_ν^{-1} M_λᵀ."""
        return sp.diags(1.0 / self.nu) @ self.adjoint_stiffness

    def dense_stiffness(self) -> np.ndarray:
        return self.stiffness.toarray()

    def row(self, node: Sequence[int]) -> int:
        return self.nodes.row(node)

    def metadata(self) -> Dict[str, Any]:
        return {
            "radius": self.radius,
            "n": self.n,
            "shift": self.shift,
            "spec_hash": self.spec_hash,
            "symmetric": self.symmetric,
            "transformed": self.transform is not None,
        }


def _neighbor_stride(radius: int, dimension: int, direction: int) -> int:
    # Lexicographic box ordering: the last coordinate varies fastest.
    return (2 * radius + 1) ** (dimension - 1 - direction)


def assemble(spec: OperatorSpec, ex: Exhaustion, k: int) -> AssembledOperator:
    """Assemble the stiffness matrix of L on the box of radius ``k``."""
    k = ex.check_radius(k, allow_any_box=True)
    nodes = ex.box(k)
    coords = nodes.coords
    n, d = coords.shape
    nu = ex.measure_on(k).copy()

    weight = np.asarray(spec.W.evaluate(coords), dtype=float)
    if weight.shape != (n,):
        raise SpecDomainMismatch("Weight field does not match the box", {"radius": k})
    bad = np.flatnonzero(~(weight > 0))
    if bad.size:
        raise AssemblyError(
            f"Weight W is not positive at node {coords[bad[0]].tolist()}",
            "NON_POSITIVE_WEIGHT",
            {"node": coords[bad[0]].tolist(), "value": float(weight[bad[0]])},
        )
    potential = np.asarray(spec.c.evaluate(coords), dtype=float)

    diagonal = potential * nu
    rows, cols, vals = [], [], []
    symmetric = True
    index = np.arange(n)

    for i in range(d):
        step = np.zeros(d, dtype=np.int64)
        step[i] = 1
        backward = coords - step

        a_f = spec.a.evaluate(coords, i)
        a_b = spec.a.evaluate(backward, i)
        for values, base in ((a_f, coords), (a_b, backward)):
            bad = np.flatnonzero(~(values > 0))
            if bad.size:
                node = base[bad[0]].tolist()
                raise NonPositiveConductance(
                    f"Conductance is not positive on edge ({node}, +e{i})",
                    {"node": node, "direction": i, "value": float(values[bad[0]])},
                )
        b_f, b_b = spec.b.evaluate(coords, i), spec.b.evaluate(backward, i)
        t_f, t_b = spec.b_tilde.evaluate(coords, i), spec.b_tilde.evaluate(backward, i)
        symmetric = symmetric and np.array_equal(b_f, t_f) and np.array_equal(b_b, t_b)

        diagonal = diagonal + a_f + a_b + 0.5 * (b_b - b_f) + 0.5 * (t_b - t_f)

        stride = _neighbor_stride(k, d, i)
        forward_in = coords[:, i] < k
        backward_in = coords[:, i] > -k
        forward_val = -a_f + 0.5 * b_f - 0.5 * t_f
        backward_val = -a_b - 0.5 * b_b + 0.5 * t_b

        for inside, offset, value in (
            (forward_in, stride, forward_val),
            (backward_in, -stride, backward_val),
        ):
            src = index[inside]
            bad = np.flatnonzero(value[inside] >= 0)
            if bad.size:
                node = coords[src[bad[0]]].tolist()
                raise DriftTooStrong(
                    f"Drift breaks the positivity structure at node {node}, direction {i}",
                    {"node": node, "direction": i, "entry": float(value[inside][bad[0]])},
                )
            rows.append(src)
            cols.append(src + offset)
            vals.append(value[inside])

    rows.append(index)
    cols.append(index)
    vals.append(diagonal)
    stiffness = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n),
    ).tocsr()
    stiffness.sort_indices()

    get_logger().log_solve("assemble", radius=k, n=n)
    return AssembledOperator(
        radius=k,
        nodes=nodes,
        stiffness=stiffness,
        nu=nu,
        weight=weight,
        shift=0.0,
        spec_hash=spec.hash,
        symmetric=bool(symmetric),
    )


def shift(
    op: AssembledOperator, lam: float, W: Optional[np.ndarray] = None
) -> AssembledOperator:
    """L_λ = L - λW; shifts accumulate in the metadata."""
    weight = op.weight if W is None else np.asarray(W, dtype=float)
    if weight.shape != (op.n,):
        raise SpecDomainMismatch(
            f"Weight has shape {weight.shape}, box has {op.n} nodes",
            {"radius": op.radius},
        )
    if lam == 0.0:
        return replace(op, weight=weight)
    stiffness = (op.stiffness - lam * sp.diags(weight * op.nu)).tocsr()
    return replace(op, stiffness=stiffness, weight=weight, shift=op.shift + lam)


def doob_transform(op: AssembledOperator, h: np.ndarray) -> AssembledOperator:
    """L^h = D_h^{-1} L D_h (applied to the stiffness, which commutes with D_ν)."""
    h = np.asarray(h, dtype=float)
    if h.shape != (op.n,):
        raise SpecDomainMismatch(
            f"Transform function has shape {h.shape}, box has {op.n} nodes",
            {"radius": op.radius},
        )
    bad = np.flatnonzero(~(h > 0))
    if bad.size:
        node = op.nodes.coords[bad[0]].tolist()
        raise NonPositiveTransformFunction(
            f"Transform function is not positive at node {node}",
            {"node": node, "value": float(h[bad[0]])},
        )
    stiffness = (sp.diags(1.0 / h) @ op.stiffness @ sp.diags(h)).tocsr()
    total = h if op.transform is None else op.transform * h
    constant = bool(np.all(h == h[0]))
    return replace(
        op,
        stiffness=stiffness,
        transform=total,
        symmetric=op.symmetric and constant,
    )


def ground_state_transform(op: AssembledOperator, phi: np.ndarray) -> AssembledOperator:
    """Doob transform by the box principal eigenfunction."""
    return doob_transform(op, phi)


def ground_state_identities(
    op: AssembledOperator,
    eigenvalue: float,
    phi: np.ndarray,
    phi_tilde: np.ndarray,
) -> Dict[str, float]:
    """Defects of (L^φ - λ0 W) 1 = 0 and (L^φ)*(φφ̃) = λ0 W φφ̃ (relative, sup norm)."""
    transformed = ground_state_transform(op, phi)
    ones = np.ones(op.n)
    target = eigenvalue * op.weight
    unit = transformed.matrix @ ones - target
    density = phi * phi_tilde
    adjoint = transformed.adjoint_matrix @ density - eigenvalue * op.weight * density
    scale_unit = max(1.0, float(np.abs(target).max()))
    scale_adj = max(1.0, float(np.abs(eigenvalue * op.weight * density).max()))
    return {
        "unit": float(np.abs(unit).max()) / scale_unit,
        "adjoint_density": float(np.abs(adjoint).max()) / scale_adj,
    }


def adjoint_defect(
    op: AssembledOperator, rng: np.random.Generator, pairs: int = 100
) -> float:
    """Worst relative ⟨Lu, v⟩_ν - ⟨u, L*v⟩_ν over random interior-supported pairs."""
    L = op.matrix
    Lstar = op.adjoint_matrix
    scale = max(1.0, float(abs(L).sum(axis=1).max()))
    worst = 0.0
    for _ in range(pairs):
        u = rng.uniform(-1.0, 1.0, op.n)
        v = rng.uniform(-1.0, 1.0, op.n)
        left = float(np.sum((L @ u) * v * op.nu))
        right = float(np.sum(u * (Lstar @ v) * op.nu))
        norm_u = float(np.sqrt(np.sum(u * u * op.nu)))
        norm_v = float(np.sqrt(np.sum(v * v * op.nu)))
        worst = max(worst, abs(left - right) / (scale * norm_u * norm_v))
    return worst


def self_adjoint_defect(op: AssembledOperator) -> float:
    """Relative ‖M - Mᵀ‖_max; zero exactly in the symmetric case."""
    diff = op.stiffness - op.adjoint_stiffness
    scale = max(1.0, float(abs(op.stiffness).max()))
    return float(abs(diff).max()) / scale if diff.nnz else 0.0
