"""Tests for scenario parsing and validation."""

import math
import warnings

import pytest

from src.configuration import UnifiedConfig
from src.error import ParseError, ScenarioError
from src.reports import SUITE_ORDER, LambdaSpec, load_scenario, parse_scenario, scenario_files

MINIMAL = """
name = "minimal"

[exhaustion]
dimension = 1
radii = [1]
"""

INTEGERS = """
name = "ints"
p = [1, 2, "inf"]
lambdas = [-5, "lambda0-1"]

[exhaustion]
dimension = 1
radii = [1]

[spectral]
stability_lambda = -2
"""


class TestLambdaSpec:
    """Absolute and λ0-relative shifts."""

    def test_absolute(self):
        spec = LambdaSpec.parse(-5)
        assert not spec.relative
        assert spec.resolve(0.3) == -5.0
        assert spec.label == "-5.0"

    def test_relative(self):
        spec = LambdaSpec.parse("lambda0-1")
        assert spec.relative
        assert spec.offset == 1.0
        assert spec.resolve(2.5) == pytest.approx(1.5)
        assert spec.label == "lambda0-1.0"
        assert LambdaSpec.parse(" lambda0 ").label == "lambda0"

    def test_invalid(self):
        with pytest.raises(ScenarioError) as info:
            LambdaSpec.parse("mu-1")
        assert info.value.error_code == "INVALID_LAMBDA"


class TestParseScenario:
    """TOML/JSON parsing with defaults filled in."""

    def test_defaults(self):
        scenario = parse_scenario(MINIMAL)
        assert scenario.exhaustion.ambient_radius == 1
        assert scenario.requested_suites == SUITE_ORDER
        assert [s.label for s in scenario.shifts] == ["lambda0-1.0", "lambda0-2.0", "-5.0"]
        assert scenario.exponents == (1.0, 1.5, 2.0, 3.0, math.inf)
        assert scenario.resolved()["p"] == [1.0, 1.5, 2.0, 3.0, "inf"]

    def test_integer_entries_become_floats(self):
        scenario = parse_scenario(INTEGERS)
        assert scenario.p == [1.0, 2.0, "inf"]
        assert all(type(v) is float for v in scenario.p[:2])
        assert scenario.lambdas == [-5.0, "lambda0-1"]
        assert type(scenario.spectral.stability_lambda) is float
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            dumped = scenario.model_dump(mode="json")
            parse_scenario(MINIMAL).model_dump()
            overridden = scenario.with_overrides(exponents=[3])
        assert dumped["p"] == [1.0, 2.0, "inf"]
        assert overridden.p == [3.0]

    def test_suites_follow_canonical_order(self):
        scenario = parse_scenario(MINIMAL).with_overrides(suites=["spectrum", "classify"])
        assert scenario.requested_suites == ("classify", "spectrum")

    def test_json(self):
        scenario = parse_scenario(
            '{"name": "j", "exhaustion": {"dimension": 2, "radii": [1, 2]}, "p": [2]}', "json"
        )
        assert scenario.exhaustion.ambient_radius == 2
        assert scenario.exponents == (2.0,)

    def test_malformed_toml_reports_position(self):
        with pytest.raises(ParseError) as info:
            parse_scenario('name = "x"\nvalue = = 3\n', source="bad.toml")
        assert info.value.line == 2
        assert info.value.column is not None
        assert "line 2" in str(info.value)

    def test_malformed_json_reports_position(self):
        with pytest.raises(ParseError) as info:
            parse_scenario('{"name": }', "json")
        assert info.value.line == 1

    @pytest.mark.parametrize(
        "extra, field",
        [
            ('lambdas = ["mu-1"]', "lambdas"),
            ("p = [0.5]", "p"),
            ("colour = 1", "colour"),
        ],
    )
    def test_invalid_fields(self, extra, field):
        text = extra + "\n" + MINIMAL
        with pytest.raises(ParseError) as info:
            parse_scenario(text)
        assert info.value.context["field"] == field

    def test_unknown_format(self):
        with pytest.raises(ParseError):
            parse_scenario(MINIMAL, "yaml")

    def test_top_level_must_be_table(self):
        with pytest.raises(ParseError):
            parse_scenario("[1, 2]", "json")


class TestOverrides:
    """Command-line and configuration overrides."""

    def test_radius_restricts_dense_suites(self):
        scenario = parse_scenario(MINIMAL).with_overrides(radius=1, lambdas=[-1.0], exponents=["inf"])
        assert scenario.spectral.radii == [1]
        assert [s.value for s in scenario.shifts] == [-1.0]
        assert scenario.exponents == (math.inf,)

    def test_unknown_radius(self):
        with pytest.raises(ScenarioError) as info:
            parse_scenario(MINIMAL).with_overrides(radius=7)
        assert info.value.error_code == "UNKNOWN_RADIUS_OVERRIDE"

    def test_tolerance_overrides(self):
        scenario = parse_scenario(MINIMAL + "\n[tolerances]\nfit_r2 = 0.9\n")
        config = scenario.config(UnifiedConfig())
        assert config.tolerances.fit_r2 == 0.9
        assert config.solver.dense_node_limit == 2000

    def test_unknown_tolerance(self):
        scenario = parse_scenario(MINIMAL + "\n[tolerances]\nfudge = 0.9\n")
        with pytest.raises(ScenarioError) as info:
            scenario.config(UnifiedConfig())
        assert info.value.error_code == "UNKNOWN_OVERRIDE"


class TestScenarioFiles:
    def test_shipped_scenarios_load(self, scenario_dir):
        names = [load_scenario(path).name for path in scenario_files(scenario_dir)]
        assert names == ["d1-drift", "d2-checkerboard", "d3-decay", "path3", "z2-recurrent", "z3"]

    def test_decay_scenario_boxes(self, scenario_dir):
        scenario = load_scenario(scenario_dir / "d3-decay.toml")
        assert scenario.exhaustion.radii == [4, 8, 16]
        assert scenario.exhaustion.ambient_radius == 24
        assert scenario.spectral.radii == [2, 4]
        assert scenario.spectral.stability_radii == [2, 4, 6]
        solver = scenario.config(UnifiedConfig()).solver
        # dense suites fit every stability box; the tail boxes go to the Krylov path
        assert (2 * 6 + 1) ** 3 <= solver.dense_node_limit
        assert (2 * 24 + 1) ** 3 > solver.direct_node_limit

    def test_directory_listing(self, tmp_path, write_scenario):
        write_scenario(MINIMAL, "b.toml")
        write_scenario("{}", "a.json")
        (tmp_path / "notes.txt").write_text("ignored")
        assert [p.name for p in scenario_files(tmp_path)] == ["a.json", "b.toml"]

    def test_wrong_suffix(self, tmp_path):
        path = tmp_path / "scenario.yaml"
        path.write_text(MINIMAL)
        with pytest.raises(ParseError):
            load_scenario(path)
