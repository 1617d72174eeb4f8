"""Lattice boxes in Z^d, nested exhaustions and tail regions.

Boxes are sup-norm balls ``{x : |x|_inf <= k}``. Every node set is ordered
lexicographically by coordinates and all matrices downstream inherit that
ordering. The infinite domain is represented by a finite ambient box of
radius ``K_max``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ..error import (
    DomainError,
    NonIncreasingRadii,
    NonPositiveMeasure,
    UnknownRadius,
)
from .fields import FieldDescription, FieldSpec, parse_field

Node = Tuple[int, ...]


@dataclass(frozen=True, eq=False)
class NodeSet:
    """Ordered lattice nodes with a stable node <-> row map."""

    coords: np.ndarray

    def __post_init__(self) -> None:
        self.coords.setflags(write=False)

    @classmethod
    def box(cls, dimension: int, radius: int) -> "NodeSet":
        axis = range(-radius, radius + 1)
        coords = np.array(list(itertools.product(axis, repeat=dimension)), dtype=np.int64)
        return cls(coords.reshape(-1, dimension))

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def dimension(self) -> int:
        return self.coords.shape[1]

    def __len__(self) -> int:
        return self.n

    @cached_property
    def index(self) -> Dict[Node, int]:
        return {tuple(node): row for row, node in enumerate(self.coords.tolist())}

    @cached_property
    def sup_norm(self) -> np.ndarray:
        return np.abs(self.coords).max(axis=1)

    def row(self, node: Sequence[int]) -> int:
        """Row of ``node``; KeyError when the node is not in the set."""
        return self.index[tuple(int(c) for c in node)]

    def __contains__(self, node: Sequence[int]) -> bool:
        return tuple(int(c) for c in node) in self.index

    def nodes(self) -> list[Node]:
        return [tuple(node) for node in self.coords.tolist()]


@dataclass(frozen=True, eq=False)
class Exhaustion:
    """Nested boxes Ω_1 ⋐ Ω_2 ⋐ ... inside an ambient box, with node measure ν."""

    dimension: int
    radii: Tuple[int, ...]
    ambient_radius: int
    anchor: Node
    nodes: NodeSet
    measure: np.ndarray
    measure_spec: FieldSpec
    _box_rows: Dict[int, np.ndarray] = field(
        default_factory=dict, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        self.measure.setflags(write=False)

    def check_radius(self, k: int, allow_any_box: bool = False) -> int:
        """Validate a box radius.

        Exhaustion radii are always accepted; with ``allow_any_box`` so is any
        box ``1 <= k <= K_max`` (the ambient box itself included).
        """
        if k in self.radii:
            return k
        if allow_any_box and 1 <= k <= self.ambient_radius:
            return k
        raise UnknownRadius(
            f"Radius {k} is not part of the exhaustion",
            {"radii": list(self.radii), "ambient_radius": self.ambient_radius},
        )

    def box_rows(self, k: int) -> np.ndarray:
        """Ambient rows of the box of radius ``k`` (lexicographic order is kept)."""
        rows = self._box_rows.get(k)
        if rows is None:
            rows = np.flatnonzero(self.nodes.sup_norm <= k)
            rows.setflags(write=False)
            self._box_rows[k] = rows
        return rows

    def box(self, k: int) -> NodeSet:
        return NodeSet(self.nodes.coords[self.box_rows(k)].copy())

    def measure_on(self, k: int) -> np.ndarray:
        return self.measure[self.box_rows(k)]

    def node_count(self, k: int) -> int:
        return (2 * k + 1) ** self.dimension

    def tail_rows(self, k: int, ambient: Optional[int] = None) -> np.ndarray:
        """Ambient rows with ``k < |x|_inf <= ambient`` (``ambient`` defaults to K_max)."""
        outer = self.ambient_radius if ambient is None else ambient
        sup = self.nodes.sup_norm
        return np.flatnonzero((sup > k) & (sup <= outer))

    @property
    def probe(self) -> Node:
        """The unit-offset probe node y0 = x0 + e_1."""
        return (self.anchor[0] + 1,) + tuple(self.anchor[1:])


def build_exhaustion(
    dimension: int,
    radii: Sequence[int],
    ambient_radius: int,
    measure_spec: FieldDescription = "unit",
    anchor: Optional[Sequence[int]] = None,
) -> Exhaustion:
    """Materialize the exhaustion and its node measure on the ambient box."""
    if dimension not in (1, 2, 3):
        raise DomainError(
            f"Lattice dimension must be 1, 2 or 3, got {dimension}",
            "UNSUPPORTED_DIMENSION",
            {"dimension": dimension},
        )
    radii = tuple(int(k) for k in radii)
    if not radii:
        raise NonIncreasingRadii("At least one box radius is required")
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise NonIncreasingRadii(
            f"Radii must be strictly increasing, got {list(radii)}",
            {"radii": list(radii)},
        )
    if radii[0] < 1:
        raise DomainError(
            f"Smallest radius must be at least 1, got {radii[0]}",
            "RADIUS_TOO_SMALL",
            {"radii": list(radii)},
        )
    if ambient_radius < radii[-1]:
        raise DomainError(
            f"Ambient radius {ambient_radius} is smaller than the largest box {radii[-1]}",
            "AMBIENT_TOO_SMALL",
            {"radii": list(radii), "ambient_radius": ambient_radius},
        )

    anchor_node: Node = tuple(int(c) for c in anchor) if anchor is not None else (0,) * dimension
    if len(anchor_node) != dimension or max(abs(c) for c in anchor_node) > radii[0]:
        raise DomainError(
            f"Anchor {list(anchor_node)} must lie in the smallest box",
            "ANCHOR_OUTSIDE",
            {"anchor": list(anchor_node), "radius": radii[0]},
        )

    nodes = NodeSet.box(dimension, ambient_radius)
    spec = measure_spec if isinstance(measure_spec, FieldSpec) else parse_field(measure_spec)
    measure = np.asarray(spec.evaluate(nodes.coords), dtype=float)
    bad = np.flatnonzero(~(measure > 0))
    if bad.size:
        node = nodes.coords[bad[0]].tolist()
        raise NonPositiveMeasure(
            f"Measure is not positive at node {node}",
            {"node": node, "value": float(measure[bad[0]])},
        )

    return Exhaustion(
        dimension=dimension,
        radii=radii,
        ambient_radius=int(ambient_radius),
        anchor=anchor_node,
        nodes=nodes,
        measure=measure,
        measure_spec=spec,
    )


def tail_region(ex: Exhaustion, k: int, mode: str = "open_tail") -> NodeSet:
    """Ambient nodes at sup-distance > k from the origin."""
    if mode != "open_tail":
        raise DomainError(f"Unknown tail mode '{mode}'", "UNKNOWN_TAIL_MODE")
    ex.check_radius(k)
    return NodeSet(ex.nodes.coords[ex.tail_rows(k)].copy())
