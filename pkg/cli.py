from __future__ import annotations

import sys
from typing import Any, Callable, List, Optional, Sequence, Union

import click
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

# Load environment from .env before importing settings
try:
    from dotenv import load_dotenv

    load_dotenv()
except Exception:
    pass

from src.configuration import get_unified_config
from src.error import ClabError, ErrorClassifier, ExitStatus, ParseError
from src.observability import configure_logging
from src.reports import SUITE_ORDER
from src.suite import SuiteState, run_scenario, verify_all

console = Console()


def _exponents(
    ctx: click.Context, param: click.Parameter, value: Optional[str]
) -> Optional[List[str]]:
    if value is None:
        return None
    items = [item.strip() for item in value.split(",") if item.strip()]
    if not items:
        raise click.BadParameter("expected a comma-separated list such as 1,2,inf")
    return items


def _lambdas(
    ctx: click.Context, param: click.Parameter, values: Sequence[str]
) -> Optional[List[Union[float, str]]]:
    if not values:
        return None
    parsed: List[Union[float, str]] = []
    for raw in values:
        try:
            parsed.append(float(raw))
        except ValueError:
            parsed.append(raw)
    return parsed


def _render_checks(title: str, state: SuiteState) -> None:
    table = Table(title=title, show_lines=False)
    table.add_column("suite", style="cyan")
    table.add_column("invariant")
    table.add_column("status")
    table.add_column("value", justify="right")
    table.add_column("threshold", justify="right")
    for check in state.checks:
        if check.passed:
            status = "[green]pass[/green]"
        elif check.diagnostic:
            status = "[yellow]diag[/yellow]"
        else:
            status = "[red]FAIL[/red]"
        value = check.value if not isinstance(check.value, float) else f"{check.value:.3e}"
        threshold = "" if check.threshold is None else f"{check.threshold:.1e}"
        table.add_row(check.suite, check.name, status, str(value), threshold)
    console.print(table)
    for suite, reason in state.skipped.items():
        console.print(f"[yellow]skipped[/yellow] {suite}: {reason}")
    for error in state.errors:
        console.print(Panel.fit(error.message, title=f"{error.suite} [{error.error_code}]"))
    if state.output_dir:
        console.print(f"reports written to [bold]{state.output_dir}[/bold]")


def _fail(exc: Exception) -> None:
    """Print a usage/input failure and exit with its status."""
    classifier = ErrorClassifier()
    message = classifier.get_user_message(exc)
    if isinstance(exc, ParseError) and exc.line is not None:
        message = f"{message} (line {exc.line}, column {exc.column})"
    console.rule("[bold red]Error")
    console.print(Panel.fit(message, title=getattr(exc, "error_code", "Execution failed")))
    sys.exit(classifier.exit_code(exc))


def _run(
    scenario: str,
    suites: Optional[List[str]],
    radius: Optional[int],
    lambdas: Optional[List[Union[float, str]]],
    exponents: Optional[List[str]],
    out: Optional[str],
) -> None:
    try:
        state = run_scenario(
            scenario,
            radius=radius,
            lambdas=lambdas,
            exponents=exponents,
            output_dir=out,
            suites=suites,
        )
    except ClabError as exc:
        _fail(exc)
        return
    _render_checks(state.scenario.name, state)
    sys.exit(state.exit_status)


@click.group()
@click.option("--log-level", default=None, help="Log level (default from CLAB_LOG_LEVEL)")
@click.option("--json-logs", is_flag=True, help="Emit JSON log lines")
def main(log_level: Optional[str], json_logs: bool) -> None:
    """Numerical workbench for criticality and weighted Green operators."""
    execution = get_unified_config().execution
    configure_logging(log_level or execution.log_level, json_logs or execution.log_json)


def _scenario_options(func: Callable[..., Any]) -> Callable[..., Any]:
    func = click.option("--out", "out", default=None, help="Output directory")(func)
    func = click.option(
        "--p", "exponents", default=None, callback=_exponents, help="Comma list of exponents, e.g. 1,2,inf"
    )(func)
    func = click.option(
        "--lambda", "lambdas", multiple=True, callback=_lambdas, help="Shift (number or lambda0-x); repeatable"
    )(func)
    func = click.option("--radius", type=int, default=None, help="Restrict dense suites to one box radius")(func)
    return click.argument("scenario", type=click.Path(exists=True, dir_okay=False))(func)


@main.command()
@_scenario_options
def run(
    scenario: str,
    radius: Optional[int],
    lambdas: Optional[List[Union[float, str]]],
    exponents: Optional[List[str]],
    out: Optional[str],
) -> None:
    """Run every requested suite of a scenario."""
    _run(scenario, None, radius, lambdas, exponents, out)


def _suite_command(name: str) -> None:
    @main.command(name=name, help=f"Run the {name} suite (classify runs first when needed).")
    @_scenario_options
    def command(
        scenario: str,
        radius: Optional[int],
        lambdas: Optional[List[Union[float, str]]],
        exponents: Optional[List[str]],
        out: Optional[str],
    ) -> None:
        _run(scenario, [name], radius, lambdas, exponents, out)


for _name in SUITE_ORDER:
    _suite_command(_name)


@main.command()
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out", default=None, help="Output directory")
def verify(directory: str, out: Optional[str]) -> None:
    """Run every scenario in DIRECTORY and print one line per invariant."""
    try:
        result = verify_all(directory, out)
    except ClabError as exc:
        _fail(exc)
        return
    for name in sorted(result.states):
        _render_checks(name, result.states[name])
    for name, failure in sorted(result.failures.items()):
        console.print(Panel.fit("\n".join(failure["errors"]), title=f"{name}: not run"))
    status = result.exit_status
    colour = "green" if status == ExitStatus.PASSED.value else "red"
    console.rule(f"[bold {colour}]exit status {status}")
    sys.exit(status)


if __name__ == "__main__":
    main()
