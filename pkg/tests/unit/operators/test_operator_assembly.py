"""Tests for operator assembly, shifts and Doob transforms."""

import numpy as np
import pytest

from src.error import DriftTooStrong, NonPositiveConductance, NonPositiveTransformFunction, SpecDomainMismatch
from src.lattice import build_exhaustion
from src.operators import (
    OperatorSpec,
    adjoint_defect,
    assemble,
    doob_transform,
    ground_state_identities,
    self_adjoint_defect,
    shift,
)
from src.green import principal_pair

PATH3_STIFFNESS = np.array([[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]])


class TestAssemble:
    """Stiffness assembly on lattice boxes."""

    def test_path3_stiffness(self, path3_spec, path3_exhaustion):
        op = assemble(path3_spec, path3_exhaustion, 1)
        np.testing.assert_array_equal(op.dense_stiffness(), PATH3_STIFFNESS)
        assert op.symmetric is True
        assert op.shift == 0.0
        np.testing.assert_array_equal(op.weight_measure, np.ones(3))

    def test_drift_stiffness_and_adjoint(self, drift_spec, path3_exhaustion):
        op = assemble(drift_spec, path3_exhaustion, 1)
        expected = np.array([[2.0, -0.85, 0.0], [-1.15, 2.0, -0.85], [0.0, -1.15, 2.0]])
        np.testing.assert_allclose(op.dense_stiffness(), expected)
        assert op.symmetric is False

        dual = assemble(drift_spec.adjoint(), path3_exhaustion, 1)
        np.testing.assert_allclose(dual.dense_stiffness(), expected.T)

    def test_2d_laplacian_diagonal_and_row_sums(self):
        ex = build_exhaustion(dimension=2, radii=[2], ambient_radius=2)
        op = assemble(OperatorSpec.from_descriptions(), ex, 2)
        M = op.dense_stiffness()
        assert op.n == 25
        np.testing.assert_array_equal(np.diag(M), np.full(25, 4.0))
        # Interior rows sum to zero, the centre in particular.
        assert M[op.row((0, 0))].sum() == 0.0
        assert M[op.row((2, 2))].sum() == 2.0

    def test_measure_scales_generator_not_stiffness(self, weighted_exhaustion):
        op = assemble(OperatorSpec.from_descriptions(), weighted_exhaustion, 2)
        L = op.matrix.toarray()
        M = op.dense_stiffness()
        np.testing.assert_allclose(L, M / op.nu[:, None])

    def test_non_positive_conductance(self, path3_exhaustion):
        spec = OperatorSpec.from_descriptions(a=0.0)
        with pytest.raises(NonPositiveConductance):
            assemble(spec, path3_exhaustion, 1)

    def test_drift_too_strong(self, path3_exhaustion):
        spec = OperatorSpec.from_descriptions(b=2.5)
        with pytest.raises(DriftTooStrong):
            assemble(spec, path3_exhaustion, 1)

    def test_symmetric_case_flag(self, drift_spec):
        assert OperatorSpec.from_descriptions(b=0.2, b_tilde=0.2).symmetric_case
        assert not drift_spec.symmetric_case


class TestShift:
    """Spectral shifts L - λW."""

    def test_shift_changes_diagonal(self, path3_spec, path3_exhaustion):
        op = shift(assemble(path3_spec, path3_exhaustion, 1), -1.0)
        np.testing.assert_array_equal(np.diag(op.dense_stiffness()), np.full(3, 3.0))
        assert op.shift == -1.0

    def test_shifts_accumulate(self, path3_spec, path3_exhaustion):
        op = shift(shift(assemble(path3_spec, path3_exhaustion, 1), -1.0), 0.5)
        assert op.shift == pytest.approx(-0.5)
        np.testing.assert_allclose(np.diag(op.dense_stiffness()), np.full(3, 2.5))

    def test_weight_shape_mismatch(self, path3_spec, path3_exhaustion):
        with pytest.raises(SpecDomainMismatch):
            shift(assemble(path3_spec, path3_exhaustion, 1), -1.0, W=np.ones(4))


class TestDoobTransform:
    """Conjugation by positive functions."""

    def test_row_sums_equal_lh_over_h(self, path3_spec, path3_exhaustion):
        op = assemble(path3_spec, path3_exhaustion, 1)
        h = np.array([1.0, 2.0, 1.0])
        transformed = doob_transform(op, h)
        row_sums = np.asarray(transformed.matrix.sum(axis=1)).ravel()
        np.testing.assert_allclose(row_sums, (op.matrix @ h) / h)
        np.testing.assert_allclose(row_sums, [0.0, 1.0, 0.0])
        assert transformed.symmetric is False

    def test_non_positive_transform(self, path3_spec, path3_exhaustion):
        op = assemble(path3_spec, path3_exhaustion, 1)
        with pytest.raises(NonPositiveTransformFunction):
            doob_transform(op, np.array([1.0, 0.0, 1.0]))

    def test_ground_state_identities(self, weighted_spec, weighted_exhaustion):
        op = assemble(weighted_spec, weighted_exhaustion, 2)
        pair = principal_pair(op, anchor=weighted_exhaustion.anchor)
        defects = ground_state_identities(op, pair.eigenvalue, pair.phi, pair.phi_tilde)
        assert defects["unit"] <= 1e-10
        assert defects["adjoint_density"] <= 1e-10


class TestAdjointDefects:
    """Discrete Green identity and self-adjointness."""

    def test_adjoint_defect_random_pairs(self, weighted_spec, weighted_exhaustion, rng):
        op = assemble(weighted_spec, weighted_exhaustion, 3)
        assert adjoint_defect(op, rng, 50) <= 1e-12

    def test_self_adjoint_defect(self, path3_spec, drift_spec, path3_exhaustion):
        assert self_adjoint_defect(assemble(path3_spec, path3_exhaustion, 1)) == 0.0
        assert self_adjoint_defect(assemble(drift_spec, path3_exhaustion, 1)) == pytest.approx(0.15)
