"""Tests for coefficient field parsing and evaluation."""

import numpy as np
import pytest

from src.error import SpecDomainMismatch, UnknownPreset
from src.lattice import parse_field, spec_hash

COORDS = np.array([[-1, 0], [0, 0], [1, 1], [2, -3]])


class TestPresets:
    """Preset strings and numbers."""

    def test_unit_and_constant(self):
        np.testing.assert_array_equal(parse_field("unit").evaluate(COORDS), np.ones(4))
        np.testing.assert_array_equal(parse_field(2.5).evaluate(COORDS), np.full(4, 2.5))
        assert parse_field("constant:3").params == (3.0,)

    def test_radial(self):
        values = parse_field("radial:-1").evaluate(COORDS)
        np.testing.assert_allclose(values, [0.5, 1.0, 0.5, 0.25])

    def test_checkerboard(self):
        values = parse_field("checkerboard:1,2").evaluate(COORDS)
        np.testing.assert_array_equal(values, [2.0, 1.0, 1.0, 2.0])

    def test_indicator(self):
        values = parse_field("indicator:1,5").evaluate(COORDS)
        np.testing.assert_array_equal(values, [5.0, 5.0, 5.0, 0.0])

    def test_anisotropic_edge_field(self):
        spec = parse_field("anisotropic:1,3", "edge")
        np.testing.assert_array_equal(spec.evaluate(COORDS, 1), np.full(4, 3.0))
        with pytest.raises(SpecDomainMismatch):
            spec.evaluate(np.zeros((2, 3), dtype=int), 0)

    def test_anisotropic_is_edge_only(self):
        with pytest.raises(UnknownPreset):
            parse_field("anisotropic:1,2", "node")

    def test_unknown_preset(self):
        with pytest.raises(UnknownPreset):
            parse_field("gaussian:1")

    def test_wrong_parameter_count(self):
        with pytest.raises(UnknownPreset):
            parse_field("checkerboard:1")

    def test_boolean_rejected(self):
        with pytest.raises(UnknownPreset):
            parse_field(True)


class TestInlineTables:
    """Inline tables for node and edge fields."""

    def test_node_table(self):
        spec = parse_field({"default": 1.0, "values": [[0, 0, 4.0]]})
        np.testing.assert_array_equal(spec.evaluate(COORDS), [1.0, 4.0, 1.0, 1.0])

    def test_edge_table_uses_direction(self):
        spec = parse_field({"default": 1.0, "values": [[0, 0, 1, 2.0]]}, "edge")
        np.testing.assert_array_equal(spec.evaluate(COORDS, 1), [1.0, 2.0, 1.0, 1.0])
        np.testing.assert_array_equal(spec.evaluate(COORDS, 0), np.ones(4))

    def test_dimension_mismatch(self):
        spec = parse_field({"values": [[0, 4.0]]})
        with pytest.raises(SpecDomainMismatch):
            spec.evaluate(COORDS)

    def test_unknown_table_key(self):
        with pytest.raises(UnknownPreset):
            parse_field({"default": 1.0, "scale": 2.0})


class TestSpecHash:
    """Stable hashing of canonical descriptions."""

    def test_hash_is_stable_and_order_free(self):
        first = spec_hash({"a": parse_field("unit"), "W": parse_field("radial:-1")})
        second = spec_hash({"W": parse_field("radial:-1.0"), "a": parse_field("unit")})
        assert first == second
        assert len(first) == 16

    def test_hash_changes_with_parameters(self):
        assert spec_hash({"W": parse_field("radial:-1")}) != spec_hash({"W": parse_field("radial:-2")})
