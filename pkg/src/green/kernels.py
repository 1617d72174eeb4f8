"""Dirichlet Green kernels and principal eigenpairs on a single box.

Kernel convention: ``u(x) = Σ_y G(x, y) g(y) ν(y)`` solves ``L_λ u = g``, so
``G = (M - λ D_{Wν})^{-1}`` and the matrix of ``L_λ^{-1}`` is ``G D_ν``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..configuration import SolverConfig, get_solver_config
from ..error import (
    BoxMismatch,
    ComplexPrincipalEigenvalue,
    DenseLimitExceeded,
    NonPositiveKernel,
    OrderViolation,
    ShiftAboveBoxEigenvalue,
    SolverNoConvergence,
)
from ..lattice.domain import NodeSet
from ..observability import get_logger
from ..operators.assembly import AssembledOperator


@dataclass(frozen=True, eq=False)
class PrincipalPair:
    """Principal eigenvalue λ0^{(k)} of L on a box with right/left eigenfunctions.

    ``eigenvalue`` refers to the unshifted operator; ``phi`` is normalized by
    φ(x0) = 1 and ``phi_tilde`` either by φ̃(x0) = 1 or, when ``normalized``,
    by ⟨φ̃, Wφ⟩_ν = 1.
    """

    radius: int
    eigenvalue: float
    phi: np.ndarray
    phi_tilde: np.ndarray
    method: str
    iterations: int = 0
    normalized: bool = False

    def mass(self, op: AssembledOperator) -> float:
        """Σ φ W φ̃ ν on the box."""
        return float(np.sum(self.phi * op.weight_measure * self.phi_tilde))


@dataclass(frozen=True, eq=False)
class GreenKernel:
    """Dense Dirichlet Green function G^{Ω_k}_{L_λ} on one box."""

    radius: int
    shift: float
    matrix: np.ndarray
    nodes: NodeSet
    nu: np.ndarray
    weight: np.ndarray
    min_entry: float = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "min_entry", float(self.matrix.min()))

    @property
    def n(self) -> int:
        return self.nodes.n

    def entry(self, x: Sequence[int], y: Sequence[int]) -> float:
        return float(self.matrix[self.nodes.row(x), self.nodes.row(y)])

    def apply(self, g: np.ndarray) -> np.ndarray:
        """u = Σ_y G(·, y) g(y) ν(y)."""
        return self.matrix @ (g * self.nu)


def _anchor_row(op: AssembledOperator, anchor: Optional[Sequence[int]]) -> int:
    node = tuple(anchor) if anchor is not None else (0,) * op.nodes.dimension
    return op.row(node)


def _positive_vector(vec: np.ndarray, radius: int, which: str) -> np.ndarray:
    vec = np.asarray(vec)
    vec = vec / vec[np.argmax(np.abs(vec))]
    if np.iscomplexobj(vec):
        if np.abs(vec.imag).max() > 1e-8:
            raise ComplexPrincipalEigenvalue(
                f"Principal {which} eigenvector is not real",
                {"radius": radius, "imag": float(np.abs(vec.imag).max())},
            )
        vec = vec.real
    if not np.all(vec > 0):
        raise ComplexPrincipalEigenvalue(
            f"Principal {which} eigenvector is not sign-definite; drift too strong for Perron structure",
            {"radius": radius, "min": float(vec.min())},
        )
    return vec


def _dense_pair(op: AssembledOperator) -> Tuple[float, np.ndarray, np.ndarray, str]:
    M = op.dense_stiffness()
    B = op.weight_measure
    if op.symmetric and op.transform is None:
        values, vectors = la.eigh(M, np.diag(B), subset_by_index=[0, 0])
        vec = _positive_vector(vectors[:, 0], op.radius, "right")
        return float(values[0]), vec, vec.copy(), "dense_symmetric"

    # Standard problem for B^{-1}M; B is diagonal so left vectors scale by B.
    A = M / B[:, None]
    values, left, right = la.eig(A, left=True, right=True)
    i = int(np.argmin(values.real))
    value = values[i]
    if abs(value.imag) > 1e-8 * max(1.0, abs(value.real)):
        raise ComplexPrincipalEigenvalue(
            f"Eigenvalue with minimal real part is complex: {value}",
            {"radius": op.radius, "imag": float(value.imag)},
        )
    phi = _positive_vector(right[:, i], op.radius, "right")
    # ψᵀ B^{-1} M = λ ψᵀ  =>  Mᵀ (B^{-1}ψ) = λ B (B^{-1}ψ)
    phi_tilde = _positive_vector(np.conj(left[:, i]) / B, op.radius, "left")
    return float(value.real), phi, phi_tilde, "dense_general"


class SparseSolve:
    """Repeated solves with one sparse box matrix.

    Boxes up to ``direct_node_limit`` nodes are factorized once with SuperLU;
    larger boxes use Jacobi-preconditioned CG (symmetric matrices) or GMRES.
    """

    def __init__(
        self, matrix: sp.spmatrix, symmetric: bool, cfg: SolverConfig, radius: int = 0
    ) -> None:
        self.n = matrix.shape[0]
        self.radius = radius
        self.symmetric = symmetric
        self.iterative = self.n > cfg.direct_node_limit
        if not self.iterative:
            self._lu = spla.splu(sp.csc_matrix(matrix))
            return
        self._matrix = sp.csr_matrix(matrix)
        self._transposed = self._matrix if symmetric else self._matrix.T.tocsr()
        self._jacobi = sp.diags(1.0 / self._matrix.diagonal())
        self._rtol = max(cfg.krylov_rtol, 10.0 * np.sqrt(self.n) * np.finfo(float).eps)
        self._maxiter = cfg.krylov_max_iterations

    @property
    def method(self) -> str:
        if not self.iterative:
            return "splu"
        return "cg" if self.symmetric else "gmres"

    def solve(self, rhs: np.ndarray, transpose: bool = False) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=float)
        if not self.iterative:
            return self._lu.solve(rhs, trans="T" if transpose else "N")
        A = self._transposed if transpose else self._matrix
        if self.symmetric:
            x, info = spla.cg(
                A, rhs, rtol=self._rtol, atol=0.0, maxiter=self._maxiter, M=self._jacobi
            )
        else:
            x, info = spla.gmres(
                A, rhs, rtol=self._rtol, atol=0.0, restart=50,
                maxiter=self._maxiter, M=self._jacobi,
            )
        if info != 0:
            raise SolverNoConvergence(
                f"{self.method} did not reach rtol {self._rtol:.1e} on box {self.radius}",
                {"radius": self.radius, "n": self.n, "info": int(info)},
            )
        return x


def lambda0_lower_bound(op: AssembledOperator, v: Optional[np.ndarray] = None) -> float:
    """Collatz-Wielandt bound min (Mv)/(Bv) <= λ0^{(k)} for any v > 0 (default v ≡ 1)."""
    v = np.ones(op.n) if v is None else np.asarray(v, dtype=float)
    return float(((op.stiffness @ v) / (op.weight_measure * v)).min()) + op.shift


def _power_iterate(
    solve: Callable[[np.ndarray], np.ndarray],
    B: np.ndarray,
    start: np.ndarray,
    cfg: SolverConfig,
    radius: int,
) -> Tuple[np.ndarray, int]:
    v = start / start.max()
    last_change = np.inf
    for it in range(1, cfg.max_iterations + 1):
        w = solve(B * v)
        w = w / w[np.argmax(np.abs(w))]
        change = float(np.abs(w - v).max())
        v = w
        if change <= cfg.rtol:
            return v, it
        # Roundoff floor reached: further iterations only add noise.
        if change <= 1e-10 and change >= last_change:
            return v, it
        last_change = change
    raise SolverNoConvergence(
        f"Inverse iteration did not converge in {cfg.max_iterations} iterations",
        {"radius": radius, "last_change": last_change},
    )


def _sparse_pair(
    op: AssembledOperator, cfg: SolverConfig
) -> Tuple[float, np.ndarray, np.ndarray, str, int]:
    """Shifted inverse iteration on (M - σB)^{-1} B with σ below λ0^{(k)}."""
    M = op.stiffness.tocsr()
    B = op.weight_measure
    symmetric = op.symmetric and op.transform is None
    v = np.ones(op.n)

    # Collatz-Wielandt lower bound min (Mv)/(Bv) <= λ0, refined once after a warm-up.
    # The margin is capped so a strongly decaying W does not push σ far below λ0.
    for stage in ("warmup", "final"):
        ratios = (M @ v) / (B * v)
        lower, upper = float(ratios.min()), float(ratios.max())
        scale = max(1.0, abs(lower))
        sigma = lower - (1e-3 * min(upper - lower, scale) + 1e-12 * scale)
        solver = SparseSolve(M - sigma * sp.diags(B), symmetric, cfg, op.radius)
        if stage == "warmup":
            for _ in range(8):
                w = solver.solve(B * v)
                v = w / w.max()

    phi, total = _power_iterate(solver.solve, B, v, cfg, op.radius)
    if symmetric:
        phi_tilde = phi.copy()
    else:
        phi_tilde, its = _power_iterate(
            lambda rhs: solver.solve(rhs, transpose=True), B, np.ones(op.n), cfg, op.radius
        )
        total += its
    phi = _positive_vector(phi, op.radius, "right")
    phi_tilde = _positive_vector(phi_tilde, op.radius, "left")
    # Two-sided Rayleigh quotient
    eigenvalue = float(phi_tilde @ (M @ phi)) / float(phi_tilde @ (B * phi))
    return eigenvalue, phi, phi_tilde, "inverse_iteration", total + 8


def principal_pair(
    op: AssembledOperator,
    anchor: Optional[Sequence[int]] = None,
    normalize: bool = False,
    config: Optional[SolverConfig] = None,
) -> PrincipalPair:
    """Eigenvalue of L u = λ W u with minimal real part and its positive eigenvectors."""
    cfg = config or get_solver_config()
    started = time.perf_counter()
    iterations = 0
    if op.n <= cfg.dense_node_limit:
        value, phi, phi_tilde, method = _dense_pair(op)
    else:
        value, phi, phi_tilde, method, iterations = _sparse_pair(op, cfg)

    row = _anchor_row(op, anchor)
    phi = phi / phi[row]
    phi_tilde = phi_tilde / phi_tilde[row]
    if normalize:
        phi_tilde = phi_tilde / float(np.sum(phi * op.weight_measure * phi_tilde))

    get_logger().log_solve(
        "principal_pair",
        radius=op.radius,
        n=op.n,
        shift=op.shift,
        iterations=iterations,
        seconds=time.perf_counter() - started,
    )
    return PrincipalPair(
        radius=op.radius,
        eigenvalue=value + op.shift,
        phi=phi,
        phi_tilde=phi_tilde,
        method=method,
        iterations=iterations,
        normalized=normalize,
    )


def _check_shift(op: AssembledOperator, principal: PrincipalPair) -> None:
    if op.shift >= principal.eigenvalue:
        raise ShiftAboveBoxEigenvalue(
            f"Shift {op.shift!r} is not below λ0 of box {op.radius} ({principal.eigenvalue!r})",
            {"radius": op.radius, "shift": op.shift, "lambda0_k": principal.eigenvalue},
        )


def dirichlet_green(
    op: AssembledOperator,
    principal: Optional[PrincipalPair] = None,
    config: Optional[SolverConfig] = None,
) -> GreenKernel:
    """Dense Green kernel of L_λ (λ = op.shift) on the box."""
    cfg = config or get_solver_config()
    if op.n > cfg.dense_node_limit:
        raise DenseLimitExceeded(
            f"Box {op.radius} has {op.n} nodes, above the dense limit {cfg.dense_node_limit}",
            {"radius": op.radius, "n": op.n},
        )
    principal = principal or principal_pair(op, config=cfg)
    _check_shift(op, principal)

    started = time.perf_counter()
    matrix = la.inv(op.dense_stiffness())
    kernel = GreenKernel(
        radius=op.radius,
        shift=op.shift,
        matrix=matrix,
        nodes=op.nodes,
        nu=op.nu,
        weight=op.weight,
    )
    if not kernel.min_entry > 0:
        raise NonPositiveKernel(
            f"Green kernel of box {op.radius} has a non-positive entry ({kernel.min_entry!r})",
            {"radius": op.radius, "shift": op.shift, "min_entry": kernel.min_entry},
        )
    get_logger().log_solve(
        "dirichlet_green",
        radius=op.radius,
        n=op.n,
        shift=op.shift,
        seconds=time.perf_counter() - started,
    )
    return kernel


class GreenSolver:
    """Single rows/columns of G on large boxes without forming the dense kernel."""

    def __init__(
        self,
        op: AssembledOperator,
        principal: Optional[PrincipalPair] = None,
        config: Optional[SolverConfig] = None,
    ) -> None:
        if principal is not None:
            _check_shift(op, principal)
        self.op = op
        self._solver = SparseSolve(
            op.stiffness,
            op.symmetric and op.transform is None,
            config or get_solver_config(),
            op.radius,
        )

    @property
    def method(self) -> str:
        return self._solver.method

    def solve(self, rhs: np.ndarray, transpose: bool = False) -> np.ndarray:
        return self._solver.solve(rhs, transpose=transpose)

    def column(self, y: Sequence[int]) -> np.ndarray:
        """G(·, y)."""
        e = np.zeros(self.op.n)
        e[self.op.row(y)] = 1.0
        return self.solve(e)

    def row(self, x: Sequence[int]) -> np.ndarray:
        """G(x, ·)."""
        e = np.zeros(self.op.n)
        e[self.op.row(x)] = 1.0
        return self.solve(e, transpose=True)

    def entry(self, x: Sequence[int], y: Sequence[int]) -> float:
        return float(self.column(y)[self.op.row(x)])


@dataclass(frozen=True, eq=False)
class InvarianceDefect:
    """Nodewise defects of the invariance inequalities for (v, ṽ)."""

    right: np.ndarray
    left: np.ndarray

    @property
    def sup_right(self) -> float:
        return float(np.abs(self.right).max())

    @property
    def sup_left(self) -> float:
        return float(np.abs(self.left).max())

    @property
    def min_right(self) -> float:
        return float(self.right.min())

    @property
    def min_left(self) -> float:
        return float(self.left.min())

    def holds(self, tol: float) -> bool:
        return self.min_right >= -tol and self.min_left >= -tol

    def is_equality(self, tol: float) -> bool:
        return self.sup_right <= tol and self.sup_left <= tol

    def is_strict(self, tol: float) -> bool:
        return self.min_right > tol and self.min_left > tol

    def sign_pattern(self, tol: float) -> str:
        if self.is_equality(tol):
            return "equality"
        if self.is_strict(tol):
            return "strict"
        if self.holds(tol):
            return "mixed"
        return "violated"


def invariance_defect(
    v: np.ndarray,
    v_tilde: np.ndarray,
    lam: float,
    mu: float,
    green: GreenKernel,
) -> InvarianceDefect:
    """v/(μ-λ) - 𝒢_λ v and its left counterpart with the transposed kernel."""
    if lam >= mu:
        raise OrderViolation(
            f"Invariance defect needs λ < μ, got λ={lam!r}, μ={mu!r}",
            {"lambda": lam, "mu": mu},
        )
    if v.shape != (green.n,) or v_tilde.shape != (green.n,):
        raise BoxMismatch(
            "Functions do not match the Green kernel box",
            {"radius": green.radius, "n": green.n},
        )
    wn = green.weight * green.nu
    scale = 1.0 / (mu - lam)
    right = v * scale - green.matrix @ (wn * v)
    left = v_tilde * scale - green.matrix.T @ (wn * v_tilde)
    return InvarianceDefect(right=right, left=left)


def doob_kernel_defect(
    green: GreenKernel, transformed: GreenKernel, h: np.ndarray
) -> float:
    """max |G^h - D_h^{-1} G D_h| relative to max |G^h|."""
    if green.n != transformed.n:
        raise BoxMismatch("Kernels live on different boxes")
    expected = green.matrix * (h[None, :] / h[:, None])
    scale = max(float(np.abs(transformed.matrix).max()), 1e-300)
    return float(np.abs(transformed.matrix - expected).max()) / scale
