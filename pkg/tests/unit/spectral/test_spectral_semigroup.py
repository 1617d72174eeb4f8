"""Tests for resolvent identities, the generator and its semigroup."""

import dataclasses

import numpy as np
import pytest

from conftest import PATH3_LAMBDA0
from src.error import BoxMismatch, IdenticalShift, NotContractive, ShiftOutsideLambdaSet
from src.green import principal_pair
from src.lattice import build_exhaustion
from src.operators import assemble
from src.reports.scenario import SpectralSection
from src.spectral import (
    build_green_operator,
    generator,
    generator_checks,
    generator_difference,
    pseudoresolvent_defect,
    resolvent_defect,
)
from src.spectral.semigroup import ContractionRow
from src.weighted import weight_family


@pytest.fixture
def path3_pair(path3_spec, path3_exhaustion):
    return principal_pair(assemble(path3_spec, path3_exhaustion, 1), anchor=path3_exhaustion.anchor)


@pytest.fixture
def grids():
    """Resolvent points and times as the semigroup suite reads them."""
    section = SpectralSection()
    return [complex(re, im) for re, im in section.resolvent_points], section.times


@pytest.fixture
def operators(path3_spec, path3_exhaustion):
    return {
        lam: build_green_operator(path3_spec, path3_exhaustion, 1, lam) for lam in (-1.0, -2.0, 0.0)
    }


class TestResolventIdentities:
    """First resolvent and pseudo-resolvent identities."""

    def test_resolvent_identity(self, operators):
        assert resolvent_defect(operators[-1.0].green, operators[-2.0].green) <= 1e-12
        assert resolvent_defect(operators[0.0].green, operators[-1.0].green) <= 1e-12

    def test_pseudoresolvent(self, operators):
        assert pseudoresolvent_defect(operators[-1.0], operators[-2.0]) <= 1e-12

    def test_identical_shift(self, operators):
        with pytest.raises(IdenticalShift):
            resolvent_defect(operators[-1.0].green, operators[-1.0].green)

    def test_box_mismatch(self, operators, path3_spec):
        ex = build_exhaustion(dimension=1, radii=[1, 2], ambient_radius=2)
        other = build_green_operator(path3_spec, ex, 2, -2.0)
        with pytest.raises(BoxMismatch):
            pseudoresolvent_defect(operators[-1.0], other)


class TestGenerator:
    """A = -𝒢_{λ1}^{-1} - λ1 does not depend on λ1."""

    def test_generator_is_minus_stiffness(self, operators):
        expected = -np.array([[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]])
        np.testing.assert_allclose(generator(operators[-1.0]), expected, atol=1e-12)
        assert generator_difference(operators[-1.0], operators[-2.0]) <= 1e-12

    def test_generator_checks_pass(self, operators, path3_pair, grids):
        opr = operators[-1.0]
        spaces = weight_family(
            path3_pair.phi, path3_pair.phi_tilde, opr.weight, opr.nu, [1, 2, 3, "inf"]
        )
        report = generator_checks(opr, path3_pair.eigenvalue, spaces, *grids)
        assert report.identity_defect <= 1e-12
        assert report.contraction_gated
        assert report.semigroup_positive
        assert report.resolvent_positive
        assert set(report.resolvent_min_entries) == {0.5}
        assert report.violations() == []
        report.raise_for_violations()
        # the ground state decays like exp(-λ0 t) in every exact norm
        row = next(r for r in report.contraction_rows if r.p == "inf" and r.t == 1.0)
        assert row.norm == pytest.approx(np.exp(-PATH3_LAMBDA0), rel=1e-10)
        data = report.to_dict()
        assert len(data["resolvent"]) == 3 * len(spaces)
        assert len(data["semigroup"]) == 3 * len(spaces)
        assert not any(r["gated"] for r in data["semigroup"] if r["p"] == "3")

    def test_shift_must_stay_below_lambda0(self, operators, path3_pair, grids):
        with pytest.raises(ShiftOutsideLambdaSet):
            generator_checks(operators[-1.0], -2.0, [], *grids)

    def test_violation_raises(self, operators, path3_pair):
        opr = operators[-1.0]
        spaces = weight_family(path3_pair.phi, path3_pair.phi_tilde, opr.weight, opr.nu, [2])
        report = generator_checks(opr, path3_pair.eigenvalue, spaces, [1.0], [1.0])
        broken = dataclasses.replace(
            report,
            contraction_rows=[ContractionRow(p="2", t=1.0, norm=2.0, min_entry=0.0, gated=True)],
        )
        with pytest.raises(NotContractive) as info:
            broken.raise_for_violations()
        assert info.value.context["violations"][0]["kind"] == "semigroup"
