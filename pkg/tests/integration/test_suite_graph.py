"""Integration tests for the suite workflow on small scenarios."""

import json
from unittest.mock import patch

import pytest

from src.error import EmptyDirectory, OverflowGuard
from src.reports import load_scenario, parse_scenario
from src.suite import SuiteRunner, SuiteState, build_graph, next_step, run_scenario, verify_all

BROKEN_RADIUS = """
name = "broken"
suites = ["classify", "norms"]

[exhaustion]
dimension = 1
radii = [1]

[spectral]
radii = [7]
"""


@pytest.fixture
def path3(scenario_dir, tmp_path):
    return load_scenario(scenario_dir / "path3.toml").with_overrides(output_dir=str(tmp_path))


class TestRouting:
    """Conditional edges of the workflow."""

    def test_next_step(self, path3):
        state = SuiteState(scenario=path3, requested=["classify", "norms"])
        assert next_step(state) == "classify"
        state.completed.append("classify")
        assert next_step(state) == "norms"
        state.record_error("norms", OverflowGuard("lost scale"))
        assert next_step(state) == "report"
        state.record_error("prepare", RuntimeError("boom"))
        assert next_step(state) == "error_handler"

    def test_stream_visits_every_requested_suite(self, path3):
        app = build_graph(SuiteRunner())
        visited = [node for event in app.stream(SuiteState(scenario=path3)) for node in event]
        assert visited == ["prepare", "classify", "norms", "spectrum", "semigroup", "report"]


class TestPath3Run:
    """The three-node path passes every gated check."""

    def test_run_passes(self, path3, tmp_path):
        state = run_scenario(path3)
        assert state.exit_status == 0, [c.name for c in state.failed_checks] + [e.message for e in state.errors]
        assert state.completed == ["classify", "norms", "spectrum", "semigroup"]
        out = tmp_path / "path3"
        assert state.output_dir == str(out)
        for name in ("summary.json", "classify_report.json", "norms_report.json",
                     "spectral_report.json", "semigroup_report.json", "green_trace.csv"):
            assert (out / name).exists(), name

        summary = json.loads((out / "summary.json").read_text())
        assert summary["exit_status"] == 0
        assert summary["passed"] is True
        assert summary["resolved_scenario"]["p"][-1] == "inf"

        spectral = json.loads((out / "spectral_report.json").read_text())
        assert spectral["checks"]
        assert all(c["suite"] == "spectrum" for c in spectral["checks"])

    def test_expected_lambda0_is_checked(self, path3):
        state = run_scenario(path3, suites=["classify"])
        check = next(c for c in state.checks if c.name == "expected_lambda0_k")
        assert check.passed

    def test_rerun_is_byte_identical(self, path3, tmp_path):
        run_scenario(path3)
        out = tmp_path / "path3"
        first = {p.name: p.read_bytes() for p in out.iterdir()}
        run_scenario(path3)
        second = {p.name: p.read_bytes() for p in out.iterdir()}
        assert first == second

    def test_dependent_suite_pulls_in_classify(self, path3):
        state = run_scenario(path3, suites=["norms"])
        assert state.requested == ["classify", "norms"]
        assert state.completed == ["classify", "norms"]

    def test_shift_overrides(self, path3):
        state = run_scenario(path3, suites=["spectrum"], lambdas=[-1.0])
        assert state.exit_status == 0
        top = next(c for c in state.checks if c.name == "top_eigenvalue")
        assert top.passed


class TestFailures:
    """Errors are recorded and mapped to exit statuses."""

    def test_prepare_error_routes_to_error_handler(self, write_scenario, tmp_path):
        scenario = load_scenario(write_scenario(BROKEN_RADIUS)).with_overrides(output_dir=str(tmp_path))
        state = run_scenario(scenario)
        assert state.exit_status == 2
        assert state.errors[0].suite == "prepare"
        assert state.errors[0].error_code == "UNKNOWN_RADIUS"
        assert set(state.skipped) == {"classify", "norms"}
        assert (tmp_path / "broken" / "summary.json").exists()

    def test_suite_error_does_not_stop_the_run(self, path3):
        with patch.object(SuiteRunner, "_spectrum", side_effect=OverflowGuard("lost scale")):
            state = run_scenario(path3)
        assert state.exit_status == 1
        assert [e.suite for e in state.errors] == ["spectrum"]
        assert "semigroup" in state.completed

    def test_failed_classify_skips_dependents(self, path3):
        with patch.object(SuiteRunner, "_classify", side_effect=RuntimeError("boom")):
            state = run_scenario(path3)
        assert state.exit_status == 1
        assert set(state.skipped) == {"norms", "spectrum", "semigroup"}
        assert all("classify" in reason for reason in state.skipped.values())


class TestVerifyAll:
    """Directory runs merge results by scenario name."""

    def test_mixed_directory(self, scenario_dir, tmp_path):
        source = tmp_path / "scenarios"
        source.mkdir()
        (source / "path3.toml").write_text((scenario_dir / "path3.toml").read_text())
        (source / "bad.toml").write_text('name = "bad"\nradii = [1,\n')
        result = verify_all(source, tmp_path / "out")
        assert set(result.states) == {"path3"}
        assert result.failures["bad"]["exit_status"] == 2
        assert result.exit_status == 2
        summary = json.loads(result.summary_path.read_text())
        assert summary["scenarios"]["path3"]["exit_status"] == 0
        assert (tmp_path / "out" / "path3" / "summary.json").exists()

    def test_empty_directory(self, tmp_path):
        with pytest.raises(EmptyDirectory):
            verify_all(tmp_path)

    def test_parse_scenario_and_run(self, tmp_path):
        scenario = parse_scenario(
            f'name = "inline"\nsuites = ["classify"]\noutput_dir = "{tmp_path.as_posix()}"\n'
            "[exhaustion]\ndimension = 2\nradii = [1, 2, 3]\n[operator]\nc = 3.0\n"
        )
        state = run_scenario(scenario)
        assert state.exit_status == 0
        assert state.reports["classify"]["ground_state"]["criticality"] == "subcritical"
