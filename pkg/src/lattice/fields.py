"""Coefficient field descriptions evaluated on lattice coordinates.

Node fields (ν, W, c, V) and edge fields (a, b, b̃) are described either by
a preset string or by an inline table from a scenario file:

    "unit"                      1 everywhere
    "constant:v" or a number    v everywhere
    "radial:alpha"              (1 + |x|_inf) ** alpha
    "checkerboard:lo,hi"        lo on even sites, hi on odd sites
    "indicator:r[,h]"           h on |x|_inf <= r, 0 elsewhere (alias "bump")
    "anisotropic:v1,...,vd"     edge fields only, value per lattice direction

Inline tables look like ``{default = 1.0, values = [[x, y, value], ...]}``
for node fields and ``{default = 1.0, values = [[x, y, dir, value], ...]}``
for edge fields, where ``dir`` is the 0-based direction of the edge
``(x, x + e_dir)``.

Edge fields are always evaluated at the base node of the forward edge.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Dict, Mapping, Optional, Tuple, Union

import numpy as np

from ..error import SpecDomainMismatch, UnknownPreset

FieldDescription = Union[str, float, int, Mapping[str, Any]]

_NODE_PRESETS = {"unit", "constant", "radial", "checkerboard", "indicator", "bump"}
_EDGE_PRESETS = _NODE_PRESETS | {"anisotropic"}


def _parse_numbers(raw: str, name: str, description: str) -> Tuple[float, ...]:
    try:
        return tuple(float(part) for part in raw.split(",") if part.strip())
    except ValueError as exc:
        raise UnknownPreset(
            f"Preset '{name}' expects numeric parameters, got '{raw}'",
            {"description": description},
        ) from exc


@dataclass(frozen=True)
class FieldSpec:
    """A parsed node or edge field description."""

    kind: str  # "node" | "edge"
    preset: str
    params: Tuple[float, ...] = ()
    default: float = 0.0
    table: Dict[Tuple[int, ...], float] = field(default_factory=dict, compare=False)
    description: Any = field(default=None, compare=False)

    @property
    def canonical(self) -> Any:
        """JSON-ready canonical form (used for hashing and reports)."""
        if self.preset == "table":
            return {
                "default": self.default,
                "values": [list(key) + [value] for key, value in sorted(self.table.items())],
            }
        if not self.params:
            return self.preset
        return f"{self.preset}:{','.join(repr(p) for p in self.params)}"

    def evaluate(self, coords: np.ndarray, direction: Optional[int] = None) -> np.ndarray:
        """Evaluate on an (n, d) integer coordinate array.

        Edge fields need the lattice ``direction`` of the forward edge.
        """
        coords = np.asarray(coords)
        n, d = coords.shape
        sup = np.abs(coords).max(axis=1) if d else np.zeros(n)

        if self.kind == "edge" and direction is None:
            raise ValueError("edge fields need a lattice direction")

        if self.preset == "unit":
            return np.ones(n)
        if self.preset == "constant":
            return np.full(n, self.params[0])
        if self.preset == "radial":
            return (1.0 + sup) ** self.params[0]
        if self.preset == "checkerboard":
            lo, hi = self.params
            return np.where(coords.sum(axis=1) % 2 == 0, lo, hi)
        if self.preset in ("indicator", "bump"):
            height = self.params[1] if len(self.params) > 1 else 1.0
            return np.where(sup <= self.params[0], height, 0.0)
        if self.preset == "anisotropic":
            if len(self.params) != d:
                raise SpecDomainMismatch(
                    f"anisotropic field has {len(self.params)} directions, lattice has {d}",
                    {"description": self.canonical},
                )
            return np.full(n, self.params[direction])
        if self.preset == "table":
            return self._evaluate_table(coords, direction)
        raise UnknownPreset(f"Unknown preset '{self.preset}'")

    def _evaluate_table(self, coords: np.ndarray, direction: Optional[int]) -> np.ndarray:
        d = coords.shape[1]
        key_len = d + (1 if self.kind == "edge" else 0)
        for key in self.table:
            if len(key) != key_len:
                raise SpecDomainMismatch(
                    f"Inline table entry {list(key)} does not match dimension {d}",
                    {"kind": self.kind},
                )
        values = np.full(coords.shape[0], self.default)
        if not self.table:
            return values
        suffix = (direction,) if self.kind == "edge" else ()
        for row, node in enumerate(map(tuple, coords.tolist())):
            values[row] = self.table.get(node + suffix, self.default)
        return values


def parse_field(description: FieldDescription, kind: str = "node") -> FieldSpec:
    """Parse a preset string, a number or an inline table into a FieldSpec."""
    if kind not in ("node", "edge"):
        raise ValueError(f"kind must be 'node' or 'edge', got {kind!r}")

    if isinstance(description, bool):
        raise UnknownPreset(f"Field description cannot be a boolean: {description!r}")
    if isinstance(description, (int, float)):
        return FieldSpec(kind, "constant", (float(description),), description=description)

    if isinstance(description, Mapping):
        return _parse_table(description, kind)

    if not isinstance(description, str):
        raise UnknownPreset(f"Unsupported field description: {description!r}")

    name, _, raw = description.strip().partition(":")
    name = name.strip().lower()
    allowed = _EDGE_PRESETS if kind == "edge" else _NODE_PRESETS
    if name not in allowed:
        raise UnknownPreset(
            f"Unknown {kind} field preset '{name}'",
            {"description": description, "known": sorted(allowed)},
        )

    params = _parse_numbers(raw, name, description) if raw else ()
    expected = {
        "unit": (0, 0),
        "constant": (1, 1),
        "radial": (1, 1),
        "checkerboard": (2, 2),
        "indicator": (1, 2),
        "bump": (1, 2),
        "anisotropic": (1, 3),
    }[name]
    if not expected[0] <= len(params) <= expected[1]:
        raise UnknownPreset(
            f"Preset '{name}' takes {expected[0]}..{expected[1]} parameters, got {len(params)}",
            {"description": description},
        )
    return FieldSpec(kind, name, params, description=description)


def _parse_table(description: Mapping[str, Any], kind: str) -> FieldSpec:
    unknown = set(description) - {"default", "values"}
    if unknown:
        raise UnknownPreset(
            f"Inline table has unknown keys: {', '.join(sorted(unknown))}",
            {"kind": kind},
        )
    default = float(description.get("default", 0.0))
    table: Dict[Tuple[int, ...], float] = {}
    for entry in description.get("values", []):
        if len(entry) < 2:
            raise UnknownPreset(f"Inline table entry too short: {entry!r}")
        *key, value = entry
        table[tuple(int(k) for k in key)] = float(value)
    return FieldSpec(kind, "table", (), default, table, description=dict(description))


def spec_hash(fields: Mapping[str, FieldSpec]) -> str:
    """Stable short hash over canonical field descriptions."""
    payload = json.dumps(
        {name: spec.canonical for name, spec in fields.items()}, sort_keys=True
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:16]
