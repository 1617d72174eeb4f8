"""Suite orchestration: the LangGraph workflow over one scenario."""

from .graph import VerifyResult, build_graph, next_step, run_scenario, verify_all
from .nodes import DEPENDENCIES, REPORT_FILES, SuiteRunner
from .state import CheckResult, SuiteError, SuiteState

__all__ = [
    "DEPENDENCIES",
    "REPORT_FILES",
    "CheckResult",
    "SuiteError",
    "SuiteRunner",
    "SuiteState",
    "VerifyResult",
    "build_graph",
    "next_step",
    "run_scenario",
    "verify_all",
]
