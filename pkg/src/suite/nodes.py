from __future__ import annotations

import math
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..configuration import UnifiedConfig, get_unified_config
from ..error import ClabError, ExclusionTooLarge, ScenarioError, SuiteDependencyUnmet
from ..green import (
    GreenKernel,
    GroundStateReport,
    PrincipalPair,
    box_ground_states,
    classify,
    dirichlet_green,
    doob_kernel_defect,
    green_monotonicity,
    invariance_defect,
    principal_pair,
)
from ..green.kernels import GreenSolver
from ..lattice import Exhaustion
from ..observability import LoggingContext, get_logger
from ..operators import (
    AssembledOperator,
    OperatorSpec,
    adjoint_defect,
    assemble,
    doob_transform,
    ground_state_identities,
    self_adjoint_defect,
    shift,
)
from ..perturbation import comparability_check, mode_ordering, smallness_profiles
from ..reports.scenario import LambdaSpec, Scenario
from ..reports.writer import versions, write_bundle
from ..spectral import (
    GreenOperator,
    SpectrumStability,
    bound_target,
    eigen_identity_defect,
    gelfand_radius,
    gelfand_spread,
    generator_checks,
    generator_difference,
    green_operator,
    induced_norm,
    leading_spectrum_stability,
    pseudoresolvent_defect,
    resolvent_defect,
    schur_bound,
    spectrum,
)
from ..spectral.norms import EXACT_EXPONENTS
from ..weighted import (
    WeightedSpace,
    dual_norm_gap,
    holder_gap,
    make_weights,
    random_chain_defect,
    weight_family,
    weighted_norm,
)
from .state import SuiteState

DEPENDENCIES: Dict[str, Tuple[str, ...]] = {
    "norms": ("classify",),
    "spectrum": ("classify",),
    "semigroup": ("classify",),
    "perturb": ("classify",),
}

# Report file stem per suite
REPORT_FILES: Dict[str, str] = {
    "classify": "classify",
    "norms": "norms",
    "spectrum": "spectral",
    "semigroup": "semigroup",
    "perturb": "perturbation",
}

ZERO_MODULUS = 1e-12
LEADING_COUNT = 5

Entry = Tuple[int, LambdaSpec, float, float]


class _Tally:
    """Folds per-(k, λ, p) evaluations of one invariant into a single check."""

    def __init__(
        self,
        name: str,
        threshold: Optional[float] = None,
        diagnostic: bool = False,
        worst: Callable[..., Any] = max,
    ) -> None:
        self.name = name
        self.threshold = threshold
        self.diagnostic = diagnostic
        self.worst = worst
        self.count = 0
        self.values: List[float] = []
        self.failures: List[Dict[str, Any]] = []

    def add(self, value: Optional[float], passed: bool, **where: Any) -> bool:
        self.count += 1
        if value is not None and math.isfinite(value):
            self.values.append(float(value))
        if not passed:
            self.failures.append({"value": value, **where})
        return passed

    def at_most(self, value: float, limit: float, **where: Any) -> bool:
        return self.add(value, value <= limit, **where)

    def at_least(self, value: float, limit: float, **where: Any) -> bool:
        return self.add(value, value >= limit, **where)

    def flush(self, state: SuiteState, suite: str) -> None:
        if not self.count:
            return
        state.add_check(
            self.name,
            suite,
            passed=not self.failures,
            value=self.worst(self.values) if self.values else None,
            threshold=self.threshold,
            diagnostic=self.diagnostic,
            entries=self.count,
            failures=self.failures[:10],
        )


def _flush(state: SuiteState, suite: str, *tallies: _Tally) -> None:
    for tally in tallies:
        tally.flush(state, suite)


class SuiteRunner:
    """Runs the verification suites of one scenario.

    Assembled boxes and principal pairs are cached for the whole run;
    dense Green operators only within one suite.
    """

    ex: Exhaustion
    spec: OperatorSpec

    def __init__(self, base_config: Optional[UnifiedConfig] = None) -> None:
        self.base_config = base_config or get_unified_config()
        self.config: UnifiedConfig = self.base_config
        self.ground: Optional[GroundStateReport] = None
        self.stability: Optional[SpectrumStability] = None
        self._ops: Dict[int, AssembledOperator] = {}
        self._pairs: Dict[int, PrincipalPair] = {}
        self._green: Dict[Tuple[int, float], GreenOperator] = {}
        self._norm_tables: Dict[Tuple[int, float], Dict[str, Any]] = {}
        self.logger = get_logger()

    # Cached numerics

    def operator(self, k: int) -> AssembledOperator:
        if k not in self._ops:
            self._ops[k] = assemble(self.spec, self.ex, k)
        return self._ops[k]

    def pair(self, k: int) -> PrincipalPair:
        if k not in self._pairs:
            self._pairs[k] = principal_pair(
                self.operator(k), anchor=self.ex.anchor, config=self.config.solver
            )
        return self._pairs[k]

    def lambda0(self, k: int) -> float:
        return self.pair(k).eigenvalue

    def kernel(self, k: int, lam: float) -> GreenKernel:
        return dirichlet_green(
            shift(self.operator(k), lam), principal=self.pair(k), config=self.config.solver
        )

    def green(self, k: int, lam: float) -> GreenOperator:
        key = (k, float(lam))
        if key not in self._green:
            kernel = self.kernel(k, lam)
            self._green[key] = green_operator(
                kernel, shift(self.operator(k), lam), seed=self.config.solver.random_seed
            )
        return self._green[key]

    def dense_radii(self, scenario: Scenario) -> List[int]:
        if scenario.spectral.radii:
            return list(scenario.spectral.radii)
        limit = self.config.solver.dense_node_limit
        return [k for k in self.ex.radii if self.ex.node_count(k) <= limit]

    def entries(self, state: SuiteState, suite: str, radii: List[int]) -> List[Entry]:
        """(k, λ spec, λ, λ0^{(k)}) for every admissible shift; the rest are recorded as skipped."""
        resolved: List[Entry] = []
        for k in radii:
            lambda0_k = self.lambda0(k)
            for lam_spec in state.scenario.shifts:
                lam = lam_spec.resolve(lambda0_k)
                if lam >= lambda0_k:
                    state.skipped_entries.append(
                        {
                            "suite": suite,
                            "k": k,
                            "lambda": lam_spec.label,
                            "reason": f"shift {lam!r} is not below lambda0_k {lambda0_k!r}",
                        }
                    )
                    continue
                resolved.append((k, lam_spec, lam, lambda0_k))
        return resolved

    def _spaces(self, k: int, exponents: Sequence[float]) -> List[WeightedSpace]:
        pair = self.pair(k)
        op = self.operator(k)
        return weight_family(pair.phi, pair.phi_tilde, op.weight, op.nu, exponents)

    # Graph nodes

    def prepare(self, state: SuiteState) -> SuiteState:
        state.start_timing()
        scenario = state.scenario
        requested = list(scenario.requested_suites)
        if any(s in DEPENDENCIES for s in requested) and "classify" not in requested:
            requested.insert(0, "classify")
        state.requested = requested
        try:
            self.config = scenario.config(self.base_config)
            self.ex = scenario.build_exhaustion()
            self.spec = scenario.operator_spec()
            for k in scenario.spectral.radii or ():
                self.ex.check_radius(k, allow_any_box=True)
            for k in scenario.spectral.stability_radii or ():
                self.ex.check_radius(k, allow_any_box=True)
        except ClabError as exc:
            state.record_error("prepare", exc.with_context(scenario=scenario.name))
        except Exception as exc:  # noqa: BLE001
            state.record_error("prepare", exc)
        return state

    def _run_suite(self, state: SuiteState, name: str, body) -> SuiteState:
        started = time.perf_counter()
        with LoggingContext(scenario=state.scenario.name, suite=name):
            unmet = [d for d in DEPENDENCIES.get(name, ()) if d not in state.completed]
            if unmet:
                exc = SuiteDependencyUnmet(
                    f"Suite '{name}' needs {', '.join(unmet)} to complete first",
                    {"suite": name, "missing": unmet},
                )
                state.skipped[name] = str(exc)
                self.logger.log_suite(name, "skipped", error=exc.message)
                return state
            status, error = "completed", None
            try:
                reason = body(state)
            except ClabError as exc:
                entry = state.record_error(
                    name, exc.with_context(scenario=state.scenario.name, suite=name)
                )
                status, error = "failed", entry.message
            except Exception as exc:  # noqa: BLE001
                entry = state.record_error(name, exc)
                status, error = "failed", entry.message
            else:
                if reason:
                    state.skipped[name] = reason
                    status = "skipped"
                else:
                    state.completed.append(name)
            finally:
                self._green.clear()
            duration = time.perf_counter() - started
            state.record_timing(name, duration)
            self.logger.log_suite(name, status, duration=duration, error=error)
        return state

    def classify(self, state: SuiteState) -> SuiteState:
        return self._run_suite(state, "classify", self._classify)

    def norms(self, state: SuiteState) -> SuiteState:
        return self._run_suite(state, "norms", self._norms)

    def spectrum(self, state: SuiteState) -> SuiteState:
        return self._run_suite(state, "spectrum", self._spectrum)

    def semigroup(self, state: SuiteState) -> SuiteState:
        return self._run_suite(state, "semigroup", self._semigroup)

    def perturb(self, state: SuiteState) -> SuiteState:
        return self._run_suite(state, "perturb", self._perturb)

    def error_handler(self, state: SuiteState) -> SuiteState:
        """Mark every requested suite as not run after a failed preparation."""
        for name in state.pending:
            state.skipped[name] = f"scenario could not be prepared: {state.error}"
        self.logger.log_suite("prepare", "failed", error=state.error)
        return state

    def report(self, state: SuiteState) -> SuiteState:
        scenario = state.scenario
        for name in state.pending:
            state.skipped.setdefault(name, "not run")

        reports: Dict[str, Any] = {}
        for suite, stem in REPORT_FILES.items():
            if suite in state.reports:
                reports[stem] = {
                    **state.reports[suite],
                    "checks": [c.model_dump() for c in state.checks if c.suite == suite],
                }

        summary = {
            "scenario": scenario.name,
            "exit_status": state.exit_status,
            "passed": state.passed,
            "requested": state.requested,
            "completed": state.completed,
            "skipped": state.skipped,
            "skipped_entries": state.skipped_entries,
            "checks": [c.model_dump() for c in state.checks],
            "failed_checks": [f"{c.suite}.{c.name}" for c in state.failed_checks],
            "errors": [e.model_dump() for e in state.errors],
            "versions": versions(),
            "resolved_scenario": scenario.resolved(),
            "config": {
                "tolerances": self.config.tolerances.model_dump(),
                "solver": self.config.solver.model_dump(),
            },
        }
        base = scenario.output_dir or self.config.execution.output_dir
        directory = Path(base) / scenario.name
        try:
            write_bundle(directory, summary, reports, state.traces)
        except OSError as exc:
            state.record_error(
                "report",
                ScenarioError(
                    f"Cannot write reports to {directory}: {exc}",
                    "UNWRITABLE_OUTPUT",
                    {"scenario": scenario.name, "directory": str(directory)},
                ),
            )
        state.output_dir = str(directory)
        self.logger.log_scenario(
            scenario.name,
            exit_status=state.exit_status,
            duration=state.timing_summary()["total_duration"] or 0.0,
        )
        return state

    # classify

    def _classify(self, state: SuiteState) -> Optional[str]:
        scenario = state.scenario
        cfg = self.config
        tol = cfg.tolerances
        suite = "classify"

        boxes = box_ground_states(self.spec, self.ex, at_shift=scenario.classify_shift, config=cfg)
        for box in boxes:
            self._pairs[box.radius] = box.pair
        self.ground = report = classify(
            self.spec, self.ex, scenario.classify_shift, cfg, boxes=boxes
        )

        values = [b.eigenvalue for b in boxes]
        decrements = [a - b for a, b in zip(values, values[1:])]
        if decrements:
            state.add_check(
                "lambda0_monotone", suite, passed=min(decrements) > 0,
                value=min(decrements), threshold=0.0,
            )

        increments = green_monotonicity(boxes)
        if increments:
            scale = max(abs(v) for b in boxes for v in b.probes.values())
            worst = min(min(v) for v in increments.values())
            limit = -tol.monotone_slack * scale
            state.add_check(
                "green_monotone", suite, passed=worst >= limit, value=worst,
                threshold=limit, pairs=sorted(increments),
            )

        state.add_check(
            "ground_state_positive", suite,
            passed=all(
                b.pair.phi.min() > 0 and b.pair.phi_tilde.min() > 0 for b in boxes
            ),
            value=min(float(min(b.pair.phi.min(), b.pair.phi_tilde.min())) for b in boxes),
        )

        identities = _Tally("ground_state_identities", tol.eigen_identity_rel)
        identities_iterative = _Tally(
            "ground_state_identities_iterative", tol.eigen_identity_rel, diagnostic=True
        )
        adjoint = _Tally("adjoint_defect", tol.adjoint_defect)
        symmetric = _Tally(
            "self_adjoint", tol.adjoint_defect, diagnostic=not self.spec.symmetric_case
        )
        rng = np.random.default_rng(cfg.solver.random_seed)
        for box in boxes:
            op = self.operator(box.radius)
            defects = ground_state_identities(
                op, box.eigenvalue, box.pair.phi, box.pair.phi_tilde
            )
            worst = max(defects.values())
            target = identities if box.pair.method.startswith("dense") else identities_iterative
            target.at_most(worst, tol.eigen_identity_rel, k=box.radius, **defects)
            adjoint.at_most(
                adjoint_defect(op, rng, cfg.solver.random_pairs), tol.adjoint_defect,
                k=box.radius,
            )
            defect = self_adjoint_defect(op)
            if self.spec.symmetric_case:
                symmetric.at_most(defect, tol.adjoint_defect, k=box.radius)
            else:
                symmetric.add(defect, True, k=box.radius)
        _flush(state, suite, identities, identities_iterative, adjoint, symmetric)

        k0 = self.ex.radii[0]
        op = self.operator(k0)
        dual = assemble(self.spec.adjoint(), self.ex, k0)
        diff = dual.stiffness - op.adjoint_stiffness
        scale = max(1.0, float(abs(op.stiffness).max()))
        swapped = float(abs(diff).max()) / scale if diff.nnz else 0.0
        state.add_check(
            "adjoint_spec_duality", suite, passed=swapped <= tol.adjoint_defect,
            value=swapped, threshold=tol.adjoint_defect, k=k0,
        )

        dual_report = self._criticality_duality(state, scenario, report)
        self._doob_check(state, scenario)
        self._expectations(state, scenario, report)

        state.add_check(
            "criticality", suite,
            passed=report.criticality.value != "inconclusive",
            value=report.criticality.value, diagnostic=True, basis=report.basis,
        )
        state.add_check(
            "mass_trend", suite, passed=report.mass_trend != "inconclusive",
            value=report.mass_trend, diagnostic=True,
            masses=[b.mass for b in boxes],
        )

        state.traces["green_trace"] = self._green_trace(state, scenario, boxes)
        state.reports["classify"] = {
            "operator": self.spec.describe(),
            "ground_state": report.to_dict(),
            "adjoint_ground_state": dual_report.to_dict(),
        }
        return None

    def _criticality_duality(
        self, state: SuiteState, scenario: Scenario, report: GroundStateReport
    ) -> GroundStateReport:
        """Classify L* on the same exhaustion; its verdict must match L's."""
        if self.spec.symmetric_case:
            dual_report = report
        else:
            dual_report = classify(
                self.spec.adjoint(), self.ex, scenario.classify_shift, self.config
            )
        primal, dual = report.criticality.value, dual_report.criticality.value
        state.add_check(
            "criticality_duality", "classify", passed=primal == dual, value=dual,
            expected=primal, basis=dual_report.basis, symmetric=self.spec.symmetric_case,
        )
        return dual_report
        dense = self.dense_radii(scenario)
        if not dense:
            return
        k = dense[0]
        pair = self.pair(k)
        lam = scenario.shifts[0].resolve(pair.eigenvalue)
        if lam >= pair.eigenvalue:
            return
        base = self.kernel(k, lam)
        transformed = dirichlet_green(
            shift(doob_transform(self.operator(k), pair.phi), lam),
            principal=pair,
            config=self.config.solver,
        )
        defect = doob_kernel_defect(base, transformed, pair.phi)
        tol = self.config.tolerances.doob_kernel_abs
        state.add_check(
            "doob_kernel", "classify", passed=defect <= tol, value=defect,
            threshold=tol, k=k, shift=lam,
        )

    def _expectations(self, state: SuiteState, scenario: Scenario, report) -> None:
        expect = scenario.expect
        tol = self.config.tolerances
        suite = "classify"
        if expect.criticality is not None:
            state.add_check(
                "expected_criticality", suite,
                passed=report.criticality.value == expect.criticality,
                value=report.criticality.value, expected=expect.criticality,
                basis=report.basis,
            )
        growth = report.growth
        if expect.walk_slope is not None:
            slope = growth.walk_slope if growth is not None else None
            passed = slope is not None and (
                abs(slope - expect.walk_slope) <= tol.slope_rel * abs(expect.walk_slope)
            )
            state.add_check(
                "expected_walk_slope", suite, passed=passed, value=slope,
                threshold=tol.slope_rel, expected=expect.walk_slope,
                r2=growth.r2 if growth is not None else None,
                model=growth.model if growth is not None else None,
            )
        if expect.max_cauchy_ratio is not None:
            ratios = growth.cauchy_ratios if growth is not None else ()
            worst = max(ratios) if ratios else None
            state.add_check(
                "expected_cauchy_ratio", suite,
                passed=worst is not None and worst <= expect.max_cauchy_ratio,
                value=worst, threshold=expect.max_cauchy_ratio, ratios=list(ratios),
            )
        if expect.lambda0_k:
            tally = _Tally("expected_lambda0_k", tol.eigen_identity_rel)
            for k, value in sorted(expect.lambda0_k.items()):
                actual = self.lambda0(k)
                error = abs(actual - value) / max(1.0, abs(value))
                tally.at_most(error, tol.eigen_identity_rel, k=k, actual=actual, expected=value)
            tally.flush(state, suite)

    def _green_trace(self, state: SuiteState, scenario: Scenario, boxes) -> List[Dict[str, Any]]:
        shifts = [LambdaSpec(value=scenario.classify_shift)] + list(scenario.shifts)
        limit = self.config.solver.dense_node_limit
        x0, y0 = self.ex.anchor, self.ex.probe
        rows: List[Dict[str, Any]] = []
        for box in boxes:
            k, lambda0_k = box.radius, box.eigenvalue
            op = self.operator(k)
            probe = y0 if y0 in op.nodes else x0
            seen = set()
            for lam_spec in shifts:
                lam = lam_spec.resolve(lambda0_k)
                if lam in seen:
                    continue
                seen.add(lam)
                if lam >= lambda0_k:
                    state.skipped_entries.append(
                        {
                            "suite": "classify",
                            "k": k,
                            "lambda": lam_spec.label,
                            "reason": f"shift {lam!r} is not below lambda0_k {lambda0_k!r}",
                        }
                    )
                    continue
                if op.n <= limit:
                    kernel = self.kernel(k, lam)
                    value, min_entry = kernel.entry(x0, probe), kernel.min_entry
                else:
                    solver = GreenSolver(shift(op, lam), config=self.config.solver)
                    column = solver.column(probe)
                    value, min_entry = float(column[op.row(x0)]), float(column.min())
                rows.append(
                    {"k": k, "lambda": lam, "G_x0y0": value, "lambda0_k": lambda0_k,
                     "min_entry": min_entry}
                )
        return rows

    # norms

    def _norms(self, state: SuiteState) -> Optional[str]:
        scenario = state.scenario
        tol = self.config.tolerances
        solver = self.config.solver
        radii = self.dense_radii(scenario)
        if not radii:
            return "no exhaustion box at or below the dense node limit"
        rng = np.random.default_rng(solver.random_seed)
        samples = solver.random_pairs

        eigen = _Tally("eigen_identity", tol.eigen_identity_rel)
        equality = _Tally("invariance_equality", tol.invariance_abs)
        contrast = _Tally("invariance_contrast", diagnostic=True, worst=min)
        bound = _Tally("norm_bound", 1.0 + tol.norm_bound_rel)
        exact = _Tally("norm_equality", tol.norm_equality_rel)
        exchange = _Tally("norm_exchange", tol.norm_equality_rel)
        schur = _Tally("schur_bound", 1.0 + tol.norm_bound_rel)
        below_schur = _Tally("norm_below_schur", 1.0 + tol.norm_bound_rel)
        duality = _Tally("duality_defect", tol.adjoint_defect)
        chain = _Tally("weighted_chain", -tol.chain_slack, worst=min)
        unit = _Tally("phi_unit_norm", tol.eigen_identity_rel)
        holder = _Tally("holder_inequality", -tol.chain_slack, worst=min)
        dual_norm = _Tally("dual_norm_attained", tol.eigen_identity_rel)
        dual_excess = _Tally("dual_norm_sup", tol.chain_slack)

        tables: List[Dict[str, Any]] = []
        for k, lam_spec, lam, lambda0_k in self.entries(state, "norms", radii):
            where = {"k": k, "lambda": lam_spec.label}
            opr = self.green(k, lam)
            pair = self.pair(k)
            spaces = self._spaces(k, scenario.exponents)
            target = bound_target(lambda0_k, lam)

            eigen.at_most(eigen_identity_defect(opr, pair.phi, lambda0_k), tol.eigen_identity_rel, **where)
            defect = invariance_defect(pair.phi, pair.phi_tilde, lam, lambda0_k, opr.green)
            relative = max(
                defect.sup_right / (target * float(pair.phi.max())),
                defect.sup_left / (target * float(pair.phi_tilde.max())),
            )
            equality.at_most(relative, tol.invariance_abs, **where)
            pattern = self._contrast(k, lam, opr)
            if pattern is not None:
                contrast.add(None, pattern == "strict", pattern=pattern, **where)
            duality.at_most(opr.duality_defect, tol.adjoint_defect, **where)

            norms: Dict[str, Any] = {}
            dual_norms: Dict[str, Any] = {}
            schur_table: Dict[str, Any] = {}
            for space in spaces:
                at = {**where, "p": space.key}
                for is_dual, table in ((False, norms), (True, dual_norms)):
                    value = induced_norm(opr, space, dual=is_dual)
                    ratio = value.value / target
                    bound.at_most(ratio, 1.0 + tol.norm_bound_rel, dual=is_dual, **at)
                    if value.exact:
                        exact.at_most(abs(ratio - 1.0), tol.norm_equality_rel, dual=is_dual, **at)
                    table[space.key] = {
                        "value": value.value, "method": value.method,
                        "margin": target - value.value,
                    }
                if 1.0 < space.p < math.inf:
                    sb = schur_bound(opr, space, lambda0_k, lam)
                    schur.at_most(sb.bound / target, 1.0 + tol.norm_bound_rel, **at)
                    below_schur.at_most(
                        norms[space.key]["value"] / sb.bound, 1.0 + tol.norm_bound_rel, **at
                    )
                    schur_table[space.key] = {
                        "row_sup": sb.row_sup, "column_sup": sb.column_sup,
                        "bound": sb.bound, "interpolated": sb.interpolated(),
                        "margin": sb.margin,
                    }
                unit.at_most(abs(weighted_norm(pair.phi, space) - 1.0), tol.eigen_identity_rel, **at)
                f = rng.standard_normal(opr.n) * pair.phi
                g = rng.standard_normal(opr.n) * space.phi_tilde
                scale = space.dual_norm(g) * space.norm(f)
                holder.at_least(holder_gap(g, f, space) / scale, -tol.chain_slack, **at)
                attained, excess = dual_norm_gap(f, space, rng, samples)
                norm_f = space.norm(f)
                dual_norm.at_most(attained / norm_f, tol.eigen_identity_rel, **at)
                dual_excess.at_most(excess / norm_f, tol.chain_slack, **at)

            if "inf" in norms and "1" in dual_norms:
                gap = abs(norms["inf"]["value"] - dual_norms["1"]["value"]) / target
                exchange.at_most(gap, tol.norm_equality_rel, **where)
            chain.at_least(random_chain_defect(spaces, rng, samples), -tol.chain_slack, **where)

            table = {
                "k": k, "lambda": lam_spec.label, "shift": lam, "lambda0_k": lambda0_k,
                "bound": target, "norms": norms, "dual_norms": dual_norms,
                "schur": schur_table, "duality_defect": opr.duality_defect,
                "invariance": {
                    "sup_right": defect.sup_right, "sup_left": defect.sup_left,
                    "contrast": pattern,
                },
            }
            self._norm_tables[(k, float(lam))] = table
            tables.append(table)

        _flush(
            state, "norms", eigen, equality, contrast, bound, exact, exchange, schur,
            below_schur, duality, chain, unit, holder, dual_norm, dual_excess,
        )
        state.reports["norms"] = {"entries": tables}
        return None

    def _contrast(self, k: int, lam: float, opr: GreenOperator) -> Optional[str]:
        """Invariance defect of the next box's principal pair restricted to box k."""
        larger = [r for r in self.ex.radii if r > k]
        if not larger:
            return None
        big = larger[0]
        pair = self.pair(big)
        if lam >= pair.eigenvalue:
            return None
        rows = np.searchsorted(self.ex.box_rows(big), self.ex.box_rows(k))
        defect = invariance_defect(
            pair.phi[rows], pair.phi_tilde[rows], lam, pair.eigenvalue, opr.green
        )
        return defect.sign_pattern(self.config.tolerances.invariance_abs)

    # spectrum

    def _spectrum(self, state: SuiteState) -> Optional[str]:
        scenario = state.scenario
        tol = self.config.tolerances
        solver = self.config.solver
        radii = [
            k for k in self.dense_radii(scenario)
            if self.ex.node_count(k) <= solver.spectrum_node_limit
        ]
        if not radii:
            return "no exhaustion box at or below the spectrum node limit"

        perron = _Tally("perron_structure", tol.perron_gap, worst=min)
        top = _Tally("top_eigenvalue", tol.spectrum_match)
        zero = _Tally("zero_not_eigenvalue", ZERO_MODULUS, worst=min)
        residual = _Tally("pde_residual", tol.pde_residual_rel)
        dual = _Tally("dual_spectrum", tol.spectrum_match)
        conjugation = _Tally("conjugation_closed", tol.spectrum_match)

        entries = self.entries(state, "spectrum", radii)
        reports: List[Dict[str, Any]] = []
        for k, lam_spec, lam, lambda0_k in entries:
            where = {"k": k, "lambda": lam_spec.label}
            opr = self.green(k, lam)
            report = spectrum(opr, expected_top=bound_target(lambda0_k, lam), config=solver)
            perron.add(
                report.gap, not report.is_degenerate(tol.perron_gap),
                multiplicity=report.multiplicity, sign_definite=report.sign_definite, **where,
            )
            top.at_most(report.top_defect, tol.spectrum_match, **where)
            zero.add(report.min_modulus, report.min_modulus > ZERO_MODULUS, **where)
            residual.at_most(report.pde_residual, tol.pde_residual_rel, **where)
            dual.at_most(report.dual_defect, tol.spectrum_match, **where)
            conjugation.at_most(report.conjugation_defect, tol.spectrum_match, **where)
            table = self._norm_tables.get((k, float(lam)), {})
            report = report.with_tables(
                norms={"primal": table.get("norms", {}), "dual": table.get("dual_norms", {})}
            )
            reports.append({"lambda": lam_spec.label, **report.to_dict()})
        _flush(state, "spectrum", perron, top, zero, residual, dual, conjugation)

        gelfand = self._gelfand(state, scenario, entries[0]) if entries else None
        stability = self._stability(state, scenario)
        state.reports["spectrum"] = {
            "entries": reports,
            "gelfand": gelfand,
            "stability": stability,
        }
        return None

    def _gelfand(self, state: SuiteState, scenario: Scenario, entry: Entry) -> Dict[str, Any]:
        """Gelfand sequences in the principal-pair spaces (gated) and with unit weights."""
        k, lam_spec, lam, lambda0_k = entry
        tol = self.config.tolerances
        n_max = scenario.spectral.gelfand_n_max or self.config.solver.gelfand_n_max
        opr = self.green(k, lam)
        expected = bound_target(lambda0_k, lam)

        principal = [gelfand_radius(opr, s, n_max) for s in self._spaces(k, EXACT_EXPONENTS)]
        spread = gelfand_spread(principal)
        drift = max(abs(s.limit - expected) / expected for s in principal)
        worst = max(spread, drift)
        state.add_check(
            "gelfand_agreement", "spectrum", passed=worst <= tol.gelfand_agreement,
            value=worst, threshold=tol.gelfand_agreement, k=k, lambda_=lam_spec.label,
        )

        op = self.operator(k)
        ones = np.ones(op.n)
        generic = [
            gelfand_radius(opr, make_weights(ones, ones, op.weight, op.nu, p), n_max)
            for p in EXACT_EXPONENTS
        ]
        first = max(s.values[0] for s in generic) - min(s.values[0] for s in generic)
        last = gelfand_spread(generic)
        state.add_check(
            "gelfand_unit_weights", "spectrum", passed=last <= first, value=last,
            diagnostic=True, first_spread=first,
        )
        state.traces["gelfand"] = [
            {"n": n, "p": s.p, "r_n": r}
            for s in principal
            for n, r in enumerate(s.values, start=1)
        ]
        return {
            "k": k,
            "lambda": lam_spec.label,
            "expected": expected,
            "n_max": n_max,
            "principal": {s.p: s.limit for s in principal},
            "unit_weights": {s.p: {"first": s.values[0], "limit": s.limit} for s in generic},
        }

    def _stability(self, state: SuiteState, scenario: Scenario) -> Optional[Dict[str, Any]]:
        tol = self.config.tolerances
        radii = scenario.spectral.stability_radii or self.dense_radii(scenario)
        if len(radii) < 3:
            return None
        lam = LambdaSpec.parse(scenario.spectral.stability_lambda).resolve(
            min(self.lambda0(k) for k in radii)
        )
        if any(lam >= self.lambda0(k) for k in radii):
            state.skipped_entries.append(
                {"suite": "spectrum", "k": list(radii), "lambda": repr(lam),
                 "reason": "stability shift is not below every lambda0_k"}
            )
            return None
        self.stability = stab = leading_spectrum_stability(
            self.spec, self.ex, lam, radii, LEADING_COUNT, self.config.solver
        )
        cauchy = stab.is_cauchy(tol.stability_ratio)
        expected = scenario.expect.spectrum_stable
        state.add_check(
            "spectrum_stability", "spectrum",
            passed=cauchy if expected is None else cauchy == expected,
            value=stab.worst_ratio, threshold=tol.stability_ratio,
            diagnostic=expected is None, ratios=list(stab.ratios),
        )
        return {
            "radii": list(stab.radii),
            "shift": lam,
            "leading": [list(row) for row in stab.leading],
            "increments": list(stab.increments),
            "ratios": list(stab.ratios),
        }

    # semigroup

    def _semigroup(self, state: SuiteState) -> Optional[str]:
        scenario = state.scenario
        tol = self.config.tolerances
        section = scenario.spectral
        radii = self.dense_radii(scenario)
        if not radii:
            return "no exhaustion box at or below the dense node limit"

        identity = _Tally("generator_identity", tol.resolvent_rel)
        independence = _Tally("generator_independence", tol.resolvent_rel)
        resolvent = _Tally("resolvent_bound", 0.0)
        resolvent_general = _Tally("resolvent_bound_general_p", 0.0, diagnostic=True)
        contraction = _Tally("semigroup_contraction", 1.0 + tol.contraction_abs)
        contraction_general = _Tally(
            "semigroup_contraction_general_p", 1.0 + tol.contraction_abs, diagnostic=True
        )
        positive = _Tally("semigroup_positive", -tol.semigroup_positivity, diagnostic=True, worst=min)
        resolvent_positive = _Tally("resolvent_positive", -tol.semigroup_positivity, worst=min)
        kernel_identity = _Tally("resolvent_identity", tol.resolvent_rel)
        pseudo = _Tally("pseudoresolvent_identity", tol.resolvent_rel)

        lambda1_spec = LambdaSpec.parse(section.lambda1)
        grid = [complex(re, im) for re, im in section.resolvent_points]
        reports: List[Dict[str, Any]] = []
        for k in radii:
            lambda0_k = self.lambda0(k)
            lambda1 = lambda1_spec.resolve(lambda0_k)
            if lambda1 >= lambda0_k:
                state.skipped_entries.append(
                    {"suite": "semigroup", "k": k, "lambda": lambda1_spec.label,
                     "reason": f"lambda1 {lambda1!r} is not below lambda0_k {lambda0_k!r}"}
                )
                continue
            opr = self.green(k, lambda1)
            spaces = self._spaces(k, scenario.exponents)
            report = generator_checks(opr, lambda0_k, spaces, grid, section.times, tol)
            identity.at_most(report.identity_defect, tol.resolvent_rel, k=k)
            independence.at_most(
                generator_difference(opr, self.green(k, lambda1 - 1.0)), tol.resolvent_rel, k=k
            )
            for row in report.resolvent_rows:
                tally = resolvent if row.gated else resolvent_general
                tally.add(row.norm - row.bound, row.passed,
                          k=k, p=row.p, lambda_=[row.lam.real, row.lam.imag])
            for row in report.contraction_rows:
                tally = contraction if row.gated else contraction_general
                tally.add(row.norm, row.passed, k=k, p=row.p, t=row.t)
                positive.at_least(row.min_entry, -tol.semigroup_positivity, k=k, t=row.t)
            for lam, value in sorted(report.resolvent_min_entries.items()):
                resolvent_positive.at_least(value, -tol.semigroup_positivity, k=k, lambda_=lam)

            shifts = [s for s in section.resolvent_shifts if s < lambda0_k]
            pairs: List[Dict[str, Any]] = []
            for i, lam in enumerate(shifts):
                for mu in shifts[i + 1:]:
                    if lam == mu:
                        continue
                    a, b = self.green(k, lam), self.green(k, mu)
                    kd = resolvent_defect(a.green, b.green)
                    od = pseudoresolvent_defect(a, b)
                    kernel_identity.at_most(kd, tol.resolvent_rel, k=k, pair=[lam, mu])
                    pseudo.at_most(od, tol.resolvent_rel, k=k, pair=[lam, mu])
                    pairs.append({"lambda": lam, "mu": mu, "kernel": kd, "operator": od})
            reports.append({**report.to_dict(), "resolvent_pairs": pairs})

        _flush(
            state, "semigroup", identity, independence, resolvent, resolvent_general,
            contraction, contraction_general, positive, resolvent_positive,
            kernel_identity, pseudo,
        )
        state.reports["semigroup"] = {"entries": reports}
        return None

    # perturb

    def _perturb(self, state: SuiteState) -> Optional[str]:
        scenario = state.scenario
        section = scenario.perturbation
        tol = self.config.tolerances
        suite = "perturb"

        profiles = smallness_profiles(
            self.spec, self.ex, section.V, section.modes, self.config, check_subcritical=True
        )
        rows: List[Dict[str, Any]] = []
        nonnegative = _Tally("perturbation_nonnegative", 0.0, worst=min)
        monotone = _Tally("perturbation_monotone", tol.monotone_slack, diagnostic=True)
        truncation = _Tally("truncation_stable", tol.truncation_rel, diagnostic=True)
        for mode, profile in profiles.items():
            if profile.skipped:
                state.skipped_entries.append(
                    {"suite": suite, "mode": mode, "reason": profile.skipped}
                )
                continue
            rows.extend(profile.rows())
            nonnegative.at_least(min(profile.values), 0.0, mode=mode)
            scale = max(max(profile.values), 1e-300)
            steps = [b - a for a, b in zip(profile.values, profile.values[1:])]
            if steps:
                monotone.at_most(max(steps) / scale, tol.monotone_slack, mode=mode)
            for row in profile.truncation:
                truncation.at_most(row.relative, tol.truncation_rel, mode=mode, k=row.radius)
        _flush(state, suite, nonnegative, monotone, truncation)

        ordering = mode_ordering(profiles)
        if ordering is not None:
            state.add_check(
                "mode_ordering", suite, passed=ordering <= tol.monotone_slack,
                value=ordering, threshold=tol.monotone_slack, diagnostic=True,
            )

        semismall = profiles.get("semismall")
        expected = scenario.expect.semismall_decay_ratio
        if expected is not None:
            ratio = semismall.decay_ratio if semismall is not None else None
            state.add_check(
                "semismall_decay", suite,
                passed=ratio is not None and ratio < expected,
                value=ratio, threshold=expected,
                verdict=semismall.verdict if semismall is not None else None,
            )
        if semismall is not None and semismall.verdict in ("decaying", "vanishing") and self.stability:
            state.add_check(
                "semismall_spectral_link", suite,
                passed=self.stability.is_cauchy(tol.stability_ratio),
                value=self.stability.worst_ratio, threshold=tol.stability_ratio,
                diagnostic=True,
            )

        comparability = None
        try:
            comp = comparability_check(
                self.spec, self.ex, section.comparability_shift, section.exclusion, self.config
            )
        except ExclusionTooLarge as exc:
            state.add_check(
                "comparability_stable", suite, passed=False, value=None,
                diagnostic=True, reason=exc.message,
            )
        else:
            comparability = comp.to_dict()
            stable = comp.stabilized(tol.truncation_rel)
            state.add_check(
                "comparability_stable", suite, passed=bool(stable), value=comp.growth,
                threshold=tol.truncation_rel, diagnostic=True,
            )

        state.traces["perturbation_profile"] = rows
        state.reports["perturb"] = {
            "profiles": {
                mode: {
                    "radii": list(p.radii),
                    "values": list(p.values),
                    "ambient_radius": p.ambient_radius,
                    "verdict": p.verdict,
                    "skipped": p.skipped,
                    "decay_ratio": p.decay_ratio,
                    "truncation_ambient": p.truncation_ambient,
                    "truncation": [
                        {"k": r.radius, "full": r.full, "half": r.half, "relative": r.relative}
                        for r in p.truncation
                    ],
                }
                for mode, p in profiles.items()
            },
            "mode_ordering": ordering,
            "comparability": comparability,
        }
        return None
