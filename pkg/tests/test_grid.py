from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gridfleet.gridworld import (
    Coord,
    InvalidRouteError,
    NoPathError,
    UnknownEdgeError,
    build_map,
    coord_to_marker,
    full_grid,
    marker_to_coord,
)
from gridfleet.showcase import (
    REFERENCE_COLLABORATIVE_ROUTES,
    REFERENCE_INDEPENDENT_ROUTES,
    showcase_scenario,
)

from tests.oracles import bfs_distances, enumerate_simple_paths


def test_marker_origin_and_corners():
    assert marker_to_coord(0) == Coord(0, 0)
    assert marker_to_coord(24) == Coord(4, 4)
    assert marker_to_coord(20) == Coord(4, 0)
    assert marker_to_coord(11) == Coord(2, 1)


def test_marker_coord_roundtrip_all_25():
    for marker in range(25):
        assert coord_to_marker(marker_to_coord(marker)) == marker


@given(st.integers(min_value=0, max_value=99), st.integers(min_value=2, max_value=10))
def test_marker_coord_roundtrip_generalized(marker, height):
    assert coord_to_marker(marker_to_coord(marker, height), height) == marker


def test_marker_rejects_negative():
    with pytest.raises(ValueError):
        marker_to_coord(-1)
    with pytest.raises(ValueError):
        full_grid().coord(25)


class TestShortestPath:
    def test_identity(self):
        assert full_grid().shortest_path(0, 0) == [0]

    def test_corner_to_corner_is_eight_edges(self):
        path = full_grid().shortest_path(0, 24)
        assert len(path) - 1 == 8

    def test_adjacent_pair(self):
        assert full_grid().shortest_path(11, 10) == [11, 10]

    def test_lexicographic_tie_break(self):
        # among all 8-edge corner-to-corner paths the smallest sequence
        # climbs the first column before heading east
        assert full_grid().shortest_path(0, 24) == [0, 1, 2, 3, 4, 9, 14, 19, 24]

    def test_matches_manhattan_on_all_pairs(self):
        grid = full_grid()
        for a in range(25):
            for b in range(25):
                expect = grid.coord(a).manhattan(grid.coord(b))
                assert len(grid.shortest_path(a, b)) - 1 == expect

    def test_no_path_when_disconnected(self):
        # cutting both roads into corner 0 strands it
        grid = build_map(removed_edges=[(0, 1), (0, 5)])
        with pytest.raises(NoPathError):
            grid.shortest_path(0, 24)

    def test_not_longer_than_any_enumerated_route(self):
        grid = full_grid()
        edges = set(grid.edges)
        for a, b in [(0, 7), (3, 21), (12, 24)]:
            best = len(grid.shortest_path(a, b)) - 1
            for path in enumerate_simple_paths(edges, a, b, max_edges=8):
                assert best <= len(path) - 1

    def test_respects_removed_edges(self):
        grid = build_map(removed_edges=[(11, 12)])
        edges = {e for e in grid.edges}
        dist = bfs_distances(edges, 11)
        assert len(grid.shortest_path(11, 12)) - 1 == dist[12] == 3


class TestRouteLength:
    def test_reference_collaborative_routes(self):
        grid = showcase_scenario().build_map()
        lengths = {
            truck: grid.route_length(route)
            for truck, route in REFERENCE_COLLABORATIVE_ROUTES.items()
        }
        assert lengths == {"T1": 10, "T2": 8, "T3": 6}
        assert sum(lengths.values()) == 24

    def test_reference_independent_routes(self):
        grid = showcase_scenario().build_map()
        lengths = {
            truck: grid.route_length(route)
            for truck, route in REFERENCE_INDEPENDENT_ROUTES.items()
        }
        assert lengths == {"T1": 10, "T2": 12, "T3": 10}
        assert sum(lengths.values()) == 32

    def test_empty_and_single_node(self):
        grid = full_grid()
        assert grid.route_length([]) == 0
        assert grid.route_length([7]) == 0

    def test_invalid_hop_is_named(self):
        grid = full_grid()
        with pytest.raises(InvalidRouteError) as err:
            grid.route_length([0, 5, 7, 8])
        assert err.value.hop == (5, 7)
        assert err.value.index == 1

    def test_shortest_path_is_a_valid_minimal_route(self):
        grid = full_grid()
        path = grid.shortest_path(3, 22)
        assert grid.route_length(path) == grid.coord(3).manhattan(grid.coord(22))


class TestSegments:
    def test_showcase_single_track_column(self):
        grid = showcase_scenario().build_map()
        assert grid.segment_of(11, 12) == "S1"
        assert grid.segment_of(13, 12) == "S1"
        assert grid.segment_of(0, 5) is None

    def test_unknown_edge_rejected(self):
        grid = showcase_scenario().build_map()
        with pytest.raises(UnknownEdgeError):
            grid.segment_of(0, 7)

    def test_overlapping_segments_rejected(self):
        with pytest.raises(ValueError):
            build_map(segments={"S1": [(11, 12)], "S2": [(12, 11)]})


def test_build_map_rejects_unknown_removed_edge():
    with pytest.raises(UnknownEdgeError):
        build_map(removed_edges=[(0, 7)])


def test_disconnected_labeled_node_rejected():
    with pytest.raises(ValueError, match="disconnected"):
        build_map(
            removed_edges=[(0, 1), (0, 5)],
            node_labels={0: "D1", 24: "C1"},
        )
