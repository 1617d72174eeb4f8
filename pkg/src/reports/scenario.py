"""Scenario files: TOML or JSON with one schema, validated by pydantic.

A scenario names an exhaustion, the coefficient fields of L, the shifts λ
and exponents p to sweep, and the suites to run::

    name = "path3"
    suites = ["all"]
    lambdas = ["lambda0-1", "lambda0-2", -5.0]
    p = [1, 1.5, 2, 3, "inf"]

    [exhaustion]
    dimension = 1
    radii = [1]
    ambient_radius = 1

    [operator]
    a = "unit"
    W = "unit"

Shifts are either numbers or ``"lambda0-x"``, meaning λ0^{(k)} - x on
each box.
"""

from __future__ import annotations

import json
import math
import re
import tomllib
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..configuration import UnifiedConfig
from ..error import ClabError, ParseError, ScenarioError
from ..lattice.domain import Exhaustion, build_exhaustion
from ..operators.assembly import OperatorSpec
from ..weighted.spaces import parse_exponent

SuiteName = Literal["classify", "norms", "spectrum", "semigroup", "perturb", "all"]
SUITE_ORDER: Tuple[str, ...] = ("classify", "norms", "spectrum", "semigroup", "perturb")

FieldValue = Union[float, str, Dict[str, Any]]
LambdaValue = Union[float, str]

_LAMBDA0 = re.compile(r"^\s*lambda0\s*(?:-\s*(?P<offset>[0-9.eE+]+))?\s*$")
_TOML_POSITION = re.compile(r"at line (?P<line>\d+), column (?P<column>\d+)")


@dataclass(frozen=True)
class LambdaSpec:
    """An absolute shift or an offset below the box principal eigenvalue."""

    value: Optional[float] = None
    offset: Optional[float] = None

    @classmethod
    def parse(cls, raw: LambdaValue) -> "LambdaSpec":
        if isinstance(raw, (int, float)) and not isinstance(raw, bool):
            return cls(value=float(raw))
        match = _LAMBDA0.match(str(raw))
        if match is None:
            raise ScenarioError(
                f"Cannot read shift '{raw}'; use a number or 'lambda0-x'",
                "INVALID_LAMBDA",
                {"lambda": raw},
            )
        offset = match.group("offset")
        return cls(offset=float(offset) if offset else 0.0)

    @property
    def relative(self) -> bool:
        return self.offset is not None

    @property
    def label(self) -> str:
        if self.relative:
            return f"lambda0-{self.offset!r}" if self.offset else "lambda0"
        return repr(self.value)

    def resolve(self, lambda0_k: float) -> float:
        return lambda0_k - self.offset if self.relative else float(self.value)


def _as_float(value: Any) -> Any:
    """Integers from TOML/JSON become floats; strings pass through."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    return value


def _check(parser, value: Any) -> None:
    # Validators must raise ValueError for pydantic to collect the location.
    try:
        parser(value)
    except ClabError as exc:
        raise ValueError(exc.message) from exc


class ExhaustionSection(BaseModel):
    dimension: int = Field(ge=1, le=3)
    radii: List[int] = Field(min_length=1)
    ambient_radius: Optional[int] = None
    anchor: Optional[List[int]] = None

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def _ambient_default(self) -> "ExhaustionSection":
        if self.ambient_radius is None:
            self.ambient_radius = max(self.radii)
        return self


class OperatorSection(BaseModel):
    a: FieldValue = "unit"
    b: FieldValue = 0.0
    b_tilde: FieldValue = 0.0
    c: FieldValue = 0.0
    W: FieldValue = "unit"
    nu: FieldValue = "unit"

    model_config = ConfigDict(extra="forbid")


class SpectralSection(BaseModel):
    """Which boxes the dense suites visit and the semigroup grids."""

    radii: Optional[List[int]] = None
    gelfand_n_max: Optional[int] = Field(default=None, ge=8)
    stability_radii: Optional[List[int]] = None
    stability_lambda: LambdaValue = -1.0
    resolvent_shifts: List[float] = Field(default_factory=lambda: [-0.5, -1.0, -2.0, -4.0])
    lambda1: LambdaValue = "lambda0-1"
    resolvent_points: List[Tuple[float, float]] = Field(
        default_factory=lambda: [(0.5, 0.0), (1.0, 1.0), (2.0, -3.0)]
    )
    times: List[float] = Field(default_factory=lambda: [0.1, 1.0, 10.0])

    model_config = ConfigDict(extra="forbid")

    @field_validator("stability_lambda", "lambda1")
    @classmethod
    def _lambda(cls, value: LambdaValue) -> LambdaValue:
        _check(LambdaSpec.parse, value)
        return _as_float(value)


class PerturbationSection(BaseModel):
    V: Optional[FieldValue] = None
    modes: List[Literal["small", "semismall", "semismall_adjoint"]] = Field(
        default_factory=lambda: ["semismall", "semismall_adjoint", "small"]
    )
    exclusion: float = Field(default=1.0, ge=0.0)
    comparability_shift: float = -1.0

    model_config = ConfigDict(extra="forbid")


class ExpectSection(BaseModel):
    """Scenario-level expectations; each one present becomes a gated check."""

    criticality: Optional[Literal["subcritical", "critical", "supercritical", "inconclusive"]] = None
    walk_slope: Optional[float] = None
    max_cauchy_ratio: Optional[float] = None
    semismall_decay_ratio: Optional[float] = None
    spectrum_stable: Optional[bool] = None
    lambda0_k: Dict[int, float] = Field(default_factory=dict)

    model_config = ConfigDict(extra="forbid")


class Scenario(BaseModel):
    """A fully validated scenario."""

    name: str
    suites: List[SuiteName] = Field(default_factory=lambda: ["all"])
    lambdas: List[LambdaValue] = Field(default_factory=lambda: ["lambda0-1", "lambda0-2", -5.0])
    p: List[Union[float, str]] = Field(default_factory=lambda: [1.0, 1.5, 2.0, 3.0, "inf"])
    classify_shift: float = 0.0
    output_dir: Optional[str] = None
    exhaustion: ExhaustionSection
    operator: OperatorSection = Field(default_factory=OperatorSection)
    spectral: SpectralSection = Field(default_factory=SpectralSection)
    perturbation: PerturbationSection = Field(default_factory=PerturbationSection)
    expect: ExpectSection = Field(default_factory=ExpectSection)
    tolerances: Dict[str, float] = Field(default_factory=dict)
    solver: Dict[str, Any] = Field(default_factory=dict)

    model_config = ConfigDict(extra="forbid")

    @field_validator("lambdas")
    @classmethod
    def _lambdas(cls, values: List[LambdaValue]) -> List[LambdaValue]:
        for value in values:
            _check(LambdaSpec.parse, value)
        return [_as_float(v) for v in values]

    @field_validator("p")
    @classmethod
    def _exponents(cls, values: List[Union[float, str]]) -> List[Union[float, str]]:
        for value in values:
            _check(parse_exponent, value)
        return [_as_float(v) for v in values]

    @property
    def requested_suites(self) -> Tuple[str, ...]:
        if "all" in self.suites:
            return SUITE_ORDER
        return tuple(s for s in SUITE_ORDER if s in self.suites)

    @property
    def shifts(self) -> Tuple[LambdaSpec, ...]:
        return tuple(LambdaSpec.parse(v) for v in self.lambdas)

    @property
    def exponents(self) -> Tuple[float, ...]:
        return tuple(sorted({parse_exponent(v) for v in self.p}))

    def build_exhaustion(self) -> Exhaustion:
        ex = self.exhaustion
        return build_exhaustion(
            dimension=ex.dimension,
            radii=ex.radii,
            ambient_radius=ex.ambient_radius,
            measure_spec=self.operator.nu,
            anchor=ex.anchor,
        )

    def operator_spec(self) -> OperatorSpec:
        op = self.operator
        return OperatorSpec.from_descriptions(
            a=op.a, b=op.b, b_tilde=op.b_tilde, c=op.c, W=op.W
        )

    def config(self, base: UnifiedConfig) -> UnifiedConfig:
        return base.with_overrides(tolerances=self.tolerances, solver=self.solver)

    def resolved(self) -> Dict[str, Any]:
        """JSON-ready form with every default filled in."""
        data = self.model_dump(mode="json")
        data["p"] = ["inf" if math.isinf(p) else p for p in self.exponents]
        return data

    def with_overrides(
        self,
        radius: Optional[int] = None,
        lambdas: Optional[List[LambdaValue]] = None,
        exponents: Optional[List[Union[float, str]]] = None,
        output_dir: Optional[str] = None,
        suites: Optional[List[str]] = None,
    ) -> "Scenario":
        """Copy with command-line overrides; ``radius`` restricts the dense suites to one box."""
        data = self.model_dump()
        if radius is not None:
            if radius not in self.exhaustion.radii:
                raise ScenarioError(
                    f"Radius {radius} is not part of the exhaustion {self.exhaustion.radii}",
                    "UNKNOWN_RADIUS_OVERRIDE",
                    {"radius": radius},
                )
            data["spectral"]["radii"] = [radius]
        if lambdas is not None:
            data["lambdas"] = lambdas
        if exponents is not None:
            data["p"] = exponents
        if output_dir is not None:
            data["output_dir"] = output_dir
        if suites is not None:
            data["suites"] = suites
        return _validate(data, self.name)


def _validate(data: Dict[str, Any], source: str) -> Scenario:
    try:
        return Scenario.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"]) or "<root>"
        raise ParseError(
            f"{where}: {first['msg']}",
            {"source": source, "field": where, "errors": len(exc.errors())},
        ) from exc
    except ScenarioError as exc:
        raise exc.with_context(source=source)


def parse_scenario(text: str, fmt: str = "toml", source: str = "<string>") -> Scenario:
    """Parse scenario text in TOML or JSON."""
    if fmt == "toml":
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            position = _TOML_POSITION.search(str(exc))
            raise ParseError(
                str(exc),
                {"source": source},
                line=int(position.group("line")) if position else None,
                column=int(position.group("column")) if position else None,
            ) from exc
    elif fmt == "json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, {"source": source}, line=exc.lineno, column=exc.colno) from exc
    else:
        raise ParseError(f"Unsupported scenario format '{fmt}'", {"source": source})
    if not isinstance(data, dict):
        raise ParseError("Scenario must be a table/object at the top level", {"source": source})
    return _validate(data, source)


def load_scenario(path: Union[str, Path]) -> Scenario:
    """Read a ``.toml`` or ``.json`` scenario file."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix not in (".toml", ".json"):
        raise ParseError(
            f"Scenario files must end in .toml or .json, got '{path.name}'",
            {"source": str(path)},
        )
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"Cannot read {path}: {exc}", "UNREADABLE_SCENARIO", {"source": str(path)}) from exc
    return parse_scenario(text, suffix.lstrip("."), str(path))


def scenario_files(directory: Union[str, Path]) -> List[Path]:
    """Scenario files in a directory, sorted by name."""
    directory = Path(directory)
    return sorted(
        p for p in directory.iterdir() if p.is_file() and p.suffix.lower() in (".toml", ".json")
    )
