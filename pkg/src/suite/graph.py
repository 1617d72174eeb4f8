from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterator, Optional, Tuple, Union

from langgraph.graph import END, StateGraph

from ..configuration import UnifiedConfig, get_unified_config
from ..error import ClabError, EmptyDirectory, ErrorClassifier, ExitStatus
from ..observability import LoggingContext, TimedOperation, get_logger
from ..reports.scenario import SUITE_ORDER, Scenario, load_scenario, scenario_files
from ..reports.writer import write_json
from .nodes import SuiteRunner
from .state import SuiteState


def next_step(state: SuiteState) -> str:
    """Route to the next requested suite; failed suites do not stop the run."""
    if any(e.suite == "prepare" for e in state.errors):
        return "error_handler"
    pending = state.pending
    return pending[0] if pending else "report"


class SuiteApp:
    """Compiled workflow whose invoke always hands back a SuiteState."""

    def __init__(self, inner: Any) -> None:
        self._inner = inner

    def __getattr__(self, name: str) -> Any:
        return getattr(self._inner, name)

    def invoke(self, state: SuiteState, *args: Any, **kwargs: Any) -> SuiteState:
        result = self._inner.invoke(state, *args, **kwargs)
        return result if isinstance(result, SuiteState) else SuiteState(**result)

    def stream(self, state: SuiteState, *args: Any, **kwargs: Any) -> Iterator[Dict[str, Any]]:
        for event in self._inner.stream(state, *args, **kwargs):
            yield {
                node: s.model_dump() if isinstance(s, SuiteState) else s
                for node, s in event.items()
            }


def build_graph(runner: Optional[SuiteRunner] = None) -> SuiteApp:
    runner = runner or SuiteRunner()
    graph = StateGraph(SuiteState)
    graph.add_node("prepare", runner.prepare)
    graph.add_node("classify", runner.classify)
    graph.add_node("norms", runner.norms)
    graph.add_node("spectrum", runner.spectrum)
    graph.add_node("semigroup", runner.semigroup)
    graph.add_node("perturb", runner.perturb)
    graph.add_node("error_handler", runner.error_handler)
    graph.add_node("report", runner.report)

    graph.set_entry_point("prepare")

    routes = {name: name for name in (*SUITE_ORDER, "error_handler", "report")}
    for node in ("prepare", *SUITE_ORDER):
        graph.add_conditional_edges(node, next_step, routes)
    graph.add_edge("error_handler", "report")
    graph.add_edge("report", END)

    return SuiteApp(graph.compile())


def run_scenario(
    scenario: Union[Scenario, str, Path],
    config: Optional[UnifiedConfig] = None,
    **overrides: Any,
) -> SuiteState:
    """Run one scenario end to end and write its report bundle.

    ``overrides`` are passed to :meth:`Scenario.with_overrides`.
    """
    if not isinstance(scenario, Scenario):
        scenario = load_scenario(scenario)
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if overrides:
        scenario = scenario.with_overrides(**overrides)
    app = build_graph(SuiteRunner(config or get_unified_config()))
    with LoggingContext(scenario=scenario.name):
        with TimedOperation(get_logger(), "scenario", suites=list(scenario.requested_suites)):
            return app.invoke(SuiteState(scenario=scenario))


@dataclass
class VerifyResult:
    """Outcome of running every scenario in a directory."""

    states: Dict[str, SuiteState] = field(default_factory=dict)
    # Scenario files that failed before any suite could run
    failures: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    summary_path: Optional[Path] = None

    @property
    def exit_status(self) -> int:
        statuses = [s.exit_status for s in self.states.values()]
        statuses += [f["exit_status"] for f in self.failures.values()]
        return max(statuses, default=ExitStatus.PASSED.value)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "exit_status": self.exit_status,
            "scenarios": {
                **{
                    name: {
                        "exit_status": s.exit_status,
                        "output_dir": s.output_dir,
                        "failed_checks": [f"{c.suite}.{c.name}" for c in s.failed_checks],
                        "errors": [e.message for e in s.errors],
                    }
                    for name, s in self.states.items()
                },
                **self.failures,
            },
        }


def verify_all(
    directory: Union[str, Path],
    out: Optional[Union[str, Path]] = None,
    config: Optional[UnifiedConfig] = None,
) -> VerifyResult:
    """Run every scenario file in ``directory`` and merge the results by name."""
    config = config or get_unified_config()
    files = scenario_files(directory)
    if not files:
        raise EmptyDirectory(
            f"No .toml or .json scenario files in {directory}", {"directory": str(directory)}
        )
    logger = get_logger()
    classifier = ErrorClassifier()
    output_dir = str(out) if out is not None else None

    def _one(path: Path) -> Tuple[Path, Optional[SuiteState], Optional[ClabError]]:
        try:
            return path, run_scenario(path, config, output_dir=output_dir), None
        except ClabError as exc:
            return path, None, exc

    result = VerifyResult()
    with ThreadPoolExecutor(max_workers=config.execution.threads) as pool:
        outcomes = list(pool.map(_one, files))
    for path, state, exc in outcomes:
        if state is not None:
            result.states[state.scenario.name] = state
        elif exc is not None:
            result.failures[path.stem] = {
                "exit_status": classifier.exit_code(exc),
                "errors": [classifier.get_user_message(exc)],
                "source": str(path),
            }
            logger.log_scenario(path.stem, exit_status=classifier.exit_code(exc), duration=0.0)

    root = Path(output_dir or config.execution.output_dir)
    result.summary_path = write_json(root / "verify_summary.json", result.to_dict())
    return result
