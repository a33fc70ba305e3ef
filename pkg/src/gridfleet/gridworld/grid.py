"""Road-network model: a rectangular grid of marker nodes with optional
removed edges, single-track segments, and labelled depot/customer nodes.

Markers are integer node ids laid out column-major: id = height*x + y with
(0, 0) at the south-west corner, so on the default 5x5 map ids 0, 20 and 24
sit at the south-west, south-east and north-east corners.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator

MarkerId = int
EdgePair = tuple[MarkerId, MarkerId]


class GridError(Exception):
    """Base class for road-network errors."""


class NoPathError(GridError):
    def __init__(self, start: MarkerId, goal: MarkerId):
        super().__init__(f"no path from marker {start} to marker {goal}")
        self.start = start
        self.goal = goal


class InvalidRouteError(GridError):
    def __init__(self, hop: EdgePair, index: int):
        super().__init__(f"route hop {hop[0]}->{hop[1]} at position {index} is not a road edge")
        self.hop = hop
        self.index = index


class UnknownEdgeError(GridError):
    def __init__(self, edge: EdgePair):
        super().__init__(f"edge {edge} is not on the map")
        self.edge = edge


def normalize_edge(a: MarkerId, b: MarkerId) -> EdgePair:
    """Return the unordered edge as a sorted pair."""
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class Coord:
    x: int
    y: int

    def manhattan(self, other: "Coord") -> int:
        return abs(self.x - other.x) + abs(self.y - other.y)


def marker_to_coord(marker: MarkerId, height: int = 5) -> Coord:
    """Convert a marker id to its (column, row) coordinate."""
    if marker < 0:
        raise ValueError(f"marker id must be non-negative, got {marker}")
    return Coord(marker // height, marker % height)


def coord_to_marker(coord: Coord, height: int = 5) -> MarkerId:
    if not (0 <= coord.y < height):
        raise ValueError(f"row {coord.y} outside grid of height {height}")
    return height * coord.x + coord.y


@dataclass(frozen=True)
class GridMap:
    """Immutable road network over width*height marker nodes.

    ``edges`` holds normalized (low, high) pairs and must be a subset of the
    axis-adjacent pairs of the grid. ``segments`` maps a segment id to the
    set of edges forming one single-track stretch; segments are disjoint.
    ``node_labels`` marks depot ("D*") and customer ("C*") nodes.
    """

    width: int = 5
    height: int = 5
    edges: frozenset[EdgePair] = field(default_factory=frozenset)
    segments: dict[str, frozenset[EdgePair]] = field(default_factory=dict)
    node_labels: dict[MarkerId, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError("grid dimensions must be positive")
        for a, b in self.edges:
            if not self.is_adjacent(a, b):
                raise ValueError(f"edge ({a}, {b}) does not join axis-adjacent markers")
        seen: set[EdgePair] = set()
        for seg_id, seg_edges in self.segments.items():
            for edge in seg_edges:
                if edge not in self.edges:
                    raise ValueError(f"segment {seg_id} references unknown edge {edge}")
                if edge in seen:
                    raise ValueError(f"edge {edge} appears in more than one segment")
                seen.add(edge)
        for marker, label in self.node_labels.items():
            if not self.has_marker(marker):
                raise ValueError(f"labelled node {label} is off the map (marker {marker})")
        self._check_labeled_connectivity()

    # -- structure ---------------------------------------------------------

    @property
    def marker_count(self) -> int:
        return self.width * self.height

    def has_marker(self, marker: MarkerId) -> bool:
        return 0 <= marker < self.marker_count

    def coord(self, marker: MarkerId) -> Coord:
        if not self.has_marker(marker):
            raise ValueError(f"marker {marker} outside [0, {self.marker_count - 1}]")
        return marker_to_coord(marker, self.height)

    def marker(self, coord: Coord) -> MarkerId:
        if not (0 <= coord.x < self.width and 0 <= coord.y < self.height):
            raise ValueError(f"coordinate {coord} outside {self.width}x{self.height} grid")
        return coord_to_marker(coord, self.height)

    def is_adjacent(self, a: MarkerId, b: MarkerId) -> bool:
        if not (self.has_marker(a) and self.has_marker(b)):
            return False
        return self.coord(a).manhattan(self.coord(b)) == 1

    def has_edge(self, a: MarkerId, b: MarkerId) -> bool:
        return normalize_edge(a, b) in self.edges

    def neighbors(self, marker: MarkerId) -> list[MarkerId]:
        """Adjacent markers reachable by one road edge, in ascending id order."""
        ca = self.coord(marker)
        out = []
        for dx, dy in ((-1, 0), (0, -1), (0, 1), (1, 0)):
            nx, ny = ca.x + dx, ca.y + dy
            if 0 <= nx < self.width and 0 <= ny < self.height:
                other = self.marker(Coord(nx, ny))
                if self.has_edge(marker, other):
                    out.append(other)
        return sorted(out)

    def labeled_markers(self, prefix: str = "") -> dict[str, MarkerId]:
        return {
            label: marker
            for marker, label in self.node_labels.items()
            if label.startswith(prefix)
        }

    def _check_labeled_connectivity(self) -> None:
        markers = sorted(self.node_labels)
        if len(markers) < 2:
            return
        root = markers[0]
        seen = {root}
        frontier = [root]
        while frontier:
            cur = frontier.pop()
            for nxt in self.neighbors(cur):
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        stranded = [m for m in markers if m not in seen]
        if stranded:
            raise ValueError(
                f"labelled nodes {stranded} are disconnected from {self.node_labels[root]}"
            )

    # -- routing -----------------------------------------------------------

    def _distances_to(self, goal: MarkerId) -> dict[MarkerId, int]:
        dist = {goal: 0}
        frontier = [goal]
        while frontier:
            nxt: list[MarkerId] = []
            for node in frontier:
                for nb in self.neighbors(node):
                    if nb not in dist:
                        dist[nb] = dist[node] + 1
                        nxt.append(nb)
            frontier = nxt
        return dist

    def shortest_path(self, start: MarkerId, goal: MarkerId) -> list[MarkerId]:
        """Minimal-hop path from start to goal.

        Among equal-length paths the lexicographically smallest node
        sequence is returned, which keeps routing deterministic.
        """
        if not self.has_marker(start):
            raise ValueError(f"marker {start} outside [0, {self.marker_count - 1}]")
        if not self.has_marker(goal):
            raise ValueError(f"marker {goal} outside [0, {self.marker_count - 1}]")
        if start == goal:
            return [start]
        dist = self._distances_to(goal)
        if start not in dist:
            raise NoPathError(start, goal)
        path = [start]
        cur = start
        while cur != goal:
            # neighbors() is ascending, so the first downhill step is the
            # lexicographically smallest continuation.
            cur = next(nb for nb in self.neighbors(cur) if dist.get(nb, -1) == dist[cur] - 1)
            path.append(cur)
        return path

    def distance(self, a: MarkerId, b: MarkerId) -> int:
        if a == b:
            return 0
        dist = self._distances_to(b)
        if a not in dist:
            raise NoPathError(a, b)
        return dist[a]

    def route_length(self, route: Iterable[MarkerId]) -> int:
        """Number of edges traversed by a route; every hop must be a road edge."""
        nodes = list(route)
        for node in nodes:
            if not self.has_marker(node):
                raise ValueError(f"marker {node} outside [0, {self.marker_count - 1}]")
        for i, (a, b) in enumerate(zip(nodes, nodes[1:])):
            if not self.has_edge(a, b):
                raise InvalidRouteError((a, b), i)
        return max(0, len(nodes) - 1)

    def segment_of(self, a: MarkerId, b: MarkerId) -> str | None:
        """Single-track segment containing the edge, or None for open road."""
        edge = normalize_edge(a, b)
        if edge not in self.edges:
            raise UnknownEdgeError(edge)
        for seg_id, seg_edges in self.segments.items():
            if edge in seg_edges:
                return seg_id
        return None

    def iter_edges(self) -> Iterator[EdgePair]:
        return iter(sorted(self.edges))


def all_adjacent_edges(width: int, height: int) -> frozenset[EdgePair]:
    edges: set[EdgePair] = set()
    for x in range(width):
        for y in range(height):
            m = height * x + y
            if x + 1 < width:
                edges.add(normalize_edge(m, height * (x + 1) + y))
            if y + 1 < height:
                edges.add(normalize_edge(m, m + 1))
    return frozenset(edges)


@lru_cache(maxsize=8)
def full_grid(width: int = 5, height: int = 5) -> GridMap:
    """The permissive default map: every axis-adjacent pair is a road."""
    return GridMap(width=width, height=height, edges=all_adjacent_edges(width, height))


def build_map(
    width: int = 5,
    height: int = 5,
    removed_edges: Iterable[EdgePair] = (),
    segments: dict[str, Iterable[EdgePair]] | None = None,
    node_labels: dict[MarkerId, str] | None = None,
) -> GridMap:
    """Construct a map by removing edges from the full grid."""
    edges = set(all_adjacent_edges(width, height))
    for a, b in removed_edges:
        edge = normalize_edge(a, b)
        if edge not in edges:
            raise UnknownEdgeError(edge)
        edges.remove(edge)
    seg_map = {
        seg_id: frozenset(normalize_edge(a, b) for a, b in seg_edges)
        for seg_id, seg_edges in (segments or {}).items()
    }
    return GridMap(
        width=width,
        height=height,
        edges=frozenset(edges),
        segments=seg_map,
        node_labels=dict(node_labels or {}),
    )
