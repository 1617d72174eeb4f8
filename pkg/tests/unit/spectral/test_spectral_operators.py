"""Tests for weighted Green operators and their dense spectra."""

import dataclasses

import numpy as np
import pytest

from conftest import PATH3_ETA_MAX, PATH3_LAMBDA0
from src.configuration import SolverConfig
from src.error import DegenerateTopEigenvalue, DenseLimitExceeded, NonPositiveKernel
from src.green import dirichlet_green, principal_pair
from src.lattice import build_exhaustion
from src.operators import OperatorSpec, assemble, shift
from src.spectral import (
    build_green_operator,
    eigen_identity_defect,
    green_operator,
    leading_spectrum_stability,
    spectrum,
)


@pytest.fixture
def path3_operator(path3_spec, path3_exhaustion):
    return build_green_operator(path3_spec, path3_exhaustion, 1, -1.0)


class TestGreenOperator:
    """Kernel materialization and the duality pairing."""

    def test_kernel_is_green_times_weight(self, path3_operator):
        np.testing.assert_allclose(
            path3_operator.kernel, path3_operator.green.matrix, rtol=1e-14
        )
        assert path3_operator.symmetric
        assert path3_operator.duality_defect <= 1e-12

    def test_dual_kernel_for_nonsymmetric_operator(self, weighted_spec, weighted_exhaustion):
        opr = build_green_operator(weighted_spec, weighted_exhaustion, 2, 0.0)
        assert not opr.symmetric
        wn = opr.weight * opr.nu
        np.testing.assert_allclose(opr.dual_kernel, opr.green.matrix.T * wn[None, :])
        assert opr.duality_defect <= 1e-12

    def test_nonpositive_kernel_rejected(self, path3_operator):
        broken = dataclasses.replace(
            path3_operator.green, matrix=path3_operator.green.matrix - 1.0
        )
        with pytest.raises(NonPositiveKernel):
            green_operator(broken)


class TestSpectrum:
    """Perron structure of the dense spectrum."""

    def test_path3_spectrum(self, path3_operator):
        report = spectrum(path3_operator, expected_top=PATH3_ETA_MAX)
        assert report.method == "dense_symmetric"
        assert report.top.real == pytest.approx(PATH3_ETA_MAX, rel=1e-12)
        assert report.top_defect <= 1e-12
        expected = sorted([1.0 / (3.0 + np.sqrt(2.0)), 1.0 / 3.0, PATH3_ETA_MAX], reverse=True)
        np.testing.assert_allclose(report.eigenvalues.real, expected, rtol=1e-12)
        assert report.multiplicity == 1
        assert report.sign_definite
        assert report.gap == pytest.approx(PATH3_ETA_MAX - 1.0 / 3.0)
        assert report.pde_residual <= 1e-12
        assert report.conjugation_defect <= 1e-14
        assert not report.is_degenerate(1e-8)

    def test_nonsymmetric_spectrum(self, weighted_spec, weighted_exhaustion):
        op = assemble(weighted_spec, weighted_exhaustion, 2)
        pair = principal_pair(op, anchor=weighted_exhaustion.anchor)
        opr = build_green_operator(weighted_spec, weighted_exhaustion, 2, 0.0)
        report = spectrum(opr, expected_top=1.0 / pair.eigenvalue)
        assert report.method == "dense_general"
        assert report.top_real
        assert report.sign_definite
        assert report.top_defect <= 1e-9
        assert report.pde_residual <= 1e-8
        assert report.dual_defect <= 1e-8
        assert eigen_identity_defect(opr, pair.phi, pair.eigenvalue) <= 1e-10

    def test_degenerate_top_is_reported(self, path3_operator):
        report = dataclasses.replace(spectrum(path3_operator), multiplicity=2)
        assert report.is_degenerate(1e-8)
        with pytest.raises(DegenerateTopEigenvalue):
            report.raise_for_degeneracy(1e-8)

    def test_spectrum_node_limit(self, path3_operator):
        with pytest.raises(DenseLimitExceeded):
            spectrum(path3_operator, config=SolverConfig(spectrum_node_limit=2))

    def test_tables_are_merged(self, path3_operator):
        report = spectrum(path3_operator).with_tables(gelfand={"2": 0.5})
        report = report.with_tables(gelfand={"inf": 0.5})
        assert set(report.to_dict()["gelfand"]) == {"2", "inf"}


class TestEigenIdentity:
    def test_ground_state_identity_on_path3(self, path3_spec, path3_exhaustion, path3_operator):
        op = assemble(path3_spec, path3_exhaustion, 1)
        pair = principal_pair(op, anchor=path3_exhaustion.anchor)
        assert pair.eigenvalue == pytest.approx(PATH3_LAMBDA0)
        assert eigen_identity_defect(path3_operator, pair.phi, pair.eigenvalue) <= 1e-12

    def test_identity_at_zero_shift(self, path3_spec, path3_exhaustion):
        op = assemble(path3_spec, path3_exhaustion, 1)
        pair = principal_pair(op)
        opr = green_operator(dirichlet_green(shift(op, 0.0), principal=pair))
        assert eigen_identity_defect(opr, pair.phi, pair.eigenvalue) <= 1e-12


class TestLeadingStability:
    def test_increments_across_boxes(self):
        ex = build_exhaustion(dimension=1, radii=[2, 4, 8], ambient_radius=8)
        stability = leading_spectrum_stability(OperatorSpec.from_descriptions(), ex, -1.0, [2, 4, 8])
        assert stability.radii == (2, 4, 8)
        assert len(stability.leading[0]) == 5
        assert len(stability.increments) == 2
        assert stability.ratios[0] == pytest.approx(stability.increments[1] / stability.increments[0])
        assert stability.worst_ratio == stability.ratios[0]
        # top eigenvalue 1/(λ0_k + 1) grows toward 1
        tops = [row[0].real for row in stability.leading]
        assert tops == sorted(tops)
        assert tops[-1] < 1.0
