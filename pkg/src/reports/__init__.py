"""Scenario files and report bundles."""

from .scenario import (
    SUITE_ORDER,
    ExpectSection,
    LambdaSpec,
    Scenario,
    load_scenario,
    parse_scenario,
    scenario_files,
)
from .writer import ReportBundle, dumps, to_jsonable, versions, write_bundle, write_csv, write_json

__all__ = [
    "SUITE_ORDER",
    "ExpectSection",
    "LambdaSpec",
    "ReportBundle",
    "Scenario",
    "dumps",
    "load_scenario",
    "parse_scenario",
    "scenario_files",
    "to_jsonable",
    "versions",
    "write_bundle",
    "write_csv",
    "write_json",
]
