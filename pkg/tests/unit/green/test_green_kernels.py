"""Tests for Dirichlet Green kernels and principal eigenpairs."""

import math

import numpy as np
import pytest

from src.configuration import SolverConfig
from src.error import DenseLimitExceeded, OrderViolation, ShiftAboveBoxEigenvalue, SolverNoConvergence
from src.green import (
    GreenSolver,
    SparseSolve,
    dirichlet_green,
    doob_kernel_defect,
    invariance_defect,
    lambda0_lower_bound,
    principal_pair,
)
from src.lattice import build_exhaustion
from src.operators import OperatorSpec, assemble, doob_transform, shift

from conftest import PATH3_GREEN, PATH3_LAMBDA0


class TestPrincipalPair:
    """Principal eigenvalue and positive eigenfunctions on one box."""

    def test_path3_golden_values(self, path3_spec, path3_exhaustion):
        pair = principal_pair(assemble(path3_spec, path3_exhaustion, 1), anchor=(0,))
        assert abs(pair.eigenvalue - PATH3_LAMBDA0) <= 1e-10
        np.testing.assert_allclose(pair.phi, [1 / math.sqrt(2), 1.0, 1 / math.sqrt(2)], atol=1e-10)
        np.testing.assert_allclose(pair.phi_tilde, pair.phi)
        assert pair.method == "dense_symmetric"

    def test_eigenvalue_refers_to_unshifted_operator(self, path3_spec, path3_exhaustion):
        op = shift(assemble(path3_spec, path3_exhaustion, 1), -1.0)
        assert principal_pair(op).eigenvalue == pytest.approx(PATH3_LAMBDA0, abs=1e-10)

    def test_nonsymmetric_pair_is_positive(self, drift_spec, drift_exhaustion):
        op = assemble(drift_spec, drift_exhaustion, 3)
        pair = principal_pair(op, anchor=drift_exhaustion.anchor)
        assert pair.method == "dense_general"
        assert pair.phi.min() > 0 and pair.phi_tilde.min() > 0
        assert pair.phi[op.row((0,))] == pytest.approx(1.0)
        residual = op.dense_stiffness() @ pair.phi - pair.eigenvalue * op.weight_measure * pair.phi
        assert np.abs(residual).max() <= 1e-10

    def test_inverse_iteration_matches_dense(self, weighted_spec, weighted_exhaustion):
        op = assemble(weighted_spec, weighted_exhaustion, 3)
        dense = principal_pair(op, anchor=weighted_exhaustion.anchor)
        sparse = principal_pair(
            op, anchor=weighted_exhaustion.anchor, config=SolverConfig(dense_node_limit=10)
        )
        assert sparse.method == "inverse_iteration"
        assert sparse.eigenvalue == pytest.approx(dense.eigenvalue, rel=1e-9)
        np.testing.assert_allclose(sparse.phi, dense.phi, rtol=1e-7)
        np.testing.assert_allclose(sparse.phi_tilde, dense.phi_tilde, rtol=1e-7)

    def test_normalized_pairing(self, weighted_spec, weighted_exhaustion):
        op = assemble(weighted_spec, weighted_exhaustion, 2)
        pair = principal_pair(op, normalize=True)
        assert pair.normalized
        assert pair.mass(op) == pytest.approx(1.0)


class TestDirichletGreen:
    """Dense Green kernels."""

    def test_path3_kernel(self, path3_spec, path3_exhaustion):
        green = dirichlet_green(assemble(path3_spec, path3_exhaustion, 1))
        np.testing.assert_allclose(green.matrix, PATH3_GREEN, atol=1e-12)
        assert green.entry((0,), (0,)) == pytest.approx(1.0)
        assert green.min_entry == pytest.approx(0.25)

    def test_shift_must_stay_below_lambda0(self, path3_spec, path3_exhaustion):
        op = assemble(path3_spec, path3_exhaustion, 1)
        with pytest.raises(ShiftAboveBoxEigenvalue):
            dirichlet_green(shift(op, 1.0))

    def test_dense_limit(self, path3_spec, path3_exhaustion):
        op = assemble(path3_spec, path3_exhaustion, 1)
        with pytest.raises(DenseLimitExceeded):
            dirichlet_green(op, config=SolverConfig(dense_node_limit=2))

    def test_kernel_inverts_the_shifted_operator(self, weighted_spec, weighted_exhaustion):
        op = shift(assemble(weighted_spec, weighted_exhaustion, 3), -1.0)
        green = dirichlet_green(op)
        g = np.linspace(-1.0, 1.0, op.n)
        u = green.apply(g)
        np.testing.assert_allclose(op.matrix @ u, g, atol=1e-10)
        assert green.min_entry > 0

    def test_sparse_solver_matches_dense(self, weighted_spec, weighted_exhaustion):
        op = assemble(weighted_spec, weighted_exhaustion, 2)
        green = dirichlet_green(op)
        solver = GreenSolver(op)
        np.testing.assert_allclose(solver.column((0, 0)), green.matrix[:, op.row((0, 0))], rtol=1e-10)
        np.testing.assert_allclose(solver.row((1, 0)), green.matrix[op.row((1, 0))], rtol=1e-10)
        assert solver.entry((1, 0), (0, 1)) == pytest.approx(green.entry((1, 0), (0, 1)))


class TestInvarianceDefect:
    """v/(μ-λ) - 𝒢_λ v for principal and non-principal functions."""

    def test_principal_pair_gives_equality(self, drift_spec, drift_exhaustion):
        op = assemble(drift_spec, drift_exhaustion, 3)
        pair = principal_pair(op)
        green = dirichlet_green(shift(op, -1.0), principal=pair)
        defect = invariance_defect(pair.phi, pair.phi_tilde, -1.0, pair.eigenvalue, green)
        assert defect.sup_right <= 1e-10
        assert defect.sup_left <= 1e-10
        assert defect.sign_pattern(1e-10) == "equality"

    def test_larger_box_eigenfunction_gives_strict_inequality(self, path3_spec):
        ex = build_exhaustion(dimension=1, radii=[1, 2], ambient_radius=2)
        small, large = assemble(path3_spec, ex, 1), assemble(path3_spec, ex, 2)
        big = principal_pair(large)
        rows = np.searchsorted(ex.box_rows(2), ex.box_rows(1))
        green = dirichlet_green(shift(small, -1.0))
        defect = invariance_defect(big.phi[rows], big.phi_tilde[rows], -1.0, big.eigenvalue, green)
        assert defect.sign_pattern(1e-10) == "strict"
        assert defect.holds(1e-10)

    def test_order_violation(self, path3_spec, path3_exhaustion):
        op = assemble(path3_spec, path3_exhaustion, 1)
        green = dirichlet_green(shift(op, -1.0))
        with pytest.raises(OrderViolation):
            invariance_defect(np.ones(3), np.ones(3), 0.5, 0.5, green)


class TestDoobKernel:
    """Green kernels transform as h(x)^{-1} G(x, y) h(y)."""

    def test_doob_kernel_identity(self, drift_spec, drift_exhaustion):
        op = assemble(drift_spec, drift_exhaustion, 3)
        pair = principal_pair(op)
        base = dirichlet_green(shift(op, -0.5), principal=pair)
        transformed = dirichlet_green(shift(doob_transform(op, pair.phi), -0.5), principal=pair)
        assert doob_kernel_defect(base, transformed, pair.phi) <= 1e-10


KRYLOV = SolverConfig(direct_node_limit=10)


class TestSparseSolve:
    """SuperLU on small boxes, preconditioned Krylov above direct_node_limit."""

    def test_cg_matches_superlu(self):
        ex = build_exhaustion(dimension=2, radii=[4], ambient_radius=4)
        op = assemble(OperatorSpec.from_descriptions(c=0.5), ex, 4)
        direct, krylov = GreenSolver(op), GreenSolver(op, config=KRYLOV)
        assert direct.method == "splu"
        assert krylov.method == "cg"
        np.testing.assert_allclose(krylov.column((0, 0)), direct.column((0, 0)), rtol=1e-9)
        np.testing.assert_allclose(krylov.row((2, -1)), direct.row((2, -1)), rtol=1e-9)

    def test_gmres_matches_superlu(self, weighted_spec, weighted_exhaustion):
        op = assemble(weighted_spec, weighted_exhaustion, 3)
        direct, krylov = GreenSolver(op), GreenSolver(op, config=KRYLOV)
        assert krylov.method == "gmres"
        np.testing.assert_allclose(krylov.column((1, 0)), direct.column((1, 0)), rtol=1e-9)
        # the transposed solve carries the adjoint kernel
        np.testing.assert_allclose(krylov.row((1, 0)), direct.row((1, 0)), rtol=1e-9)

    def test_iteration_cap(self):
        ex = build_exhaustion(dimension=2, radii=[6], ambient_radius=6)
        op = assemble(OperatorSpec.from_descriptions(), ex, 6)
        cfg = SolverConfig(direct_node_limit=10, krylov_max_iterations=10)
        solver = SparseSolve(op.stiffness, True, cfg, op.radius)
        with pytest.raises(SolverNoConvergence) as info:
            solver.solve(np.ones(op.n))
        assert info.value.context["n"] == 169

    def test_inverse_iteration_on_krylov_path(self, weighted_spec, weighted_exhaustion):
        op = assemble(weighted_spec, weighted_exhaustion, 3)
        dense = principal_pair(op, anchor=weighted_exhaustion.anchor)
        sparse = principal_pair(
            op,
            anchor=weighted_exhaustion.anchor,
            config=SolverConfig(dense_node_limit=10, direct_node_limit=10),
        )
        assert sparse.method == "inverse_iteration"
        assert sparse.eigenvalue == pytest.approx(dense.eigenvalue, rel=1e-8)
        np.testing.assert_allclose(sparse.phi, dense.phi, rtol=1e-6)
        np.testing.assert_allclose(sparse.phi_tilde, dense.phi_tilde, rtol=1e-6)


class TestLowerBound:
    """min (Mv)/(Bv) bounds λ0^{(k)} from below."""

    def test_bound_below_eigenvalue(self, weighted_spec, weighted_exhaustion):
        for k in weighted_exhaustion.radii:
            op = assemble(weighted_spec, weighted_exhaustion, k)
            assert lambda0_lower_bound(op) <= principal_pair(op).eigenvalue + 1e-12

    def test_bound_is_sharp_at_the_ground_state(self, drift_spec, drift_exhaustion):
        op = shift(assemble(drift_spec, drift_exhaustion, 6), -0.5)
        pair = principal_pair(op)
        assert lambda0_lower_bound(op, pair.phi) == pytest.approx(pair.eigenvalue, rel=1e-8)

    def test_massive_operator(self, path3_exhaustion):
        op = assemble(OperatorSpec.from_descriptions(c=0.5), path3_exhaustion, 1)
        # M1 = (1.5, 0.5, 1.5) on the unit path with c = 0.5
        assert lambda0_lower_bound(op) == pytest.approx(0.5)
