"""Bundled demo fixture: three carriers, one truck each, nine customers on
the default 5x5 map with one single-track stretch along the x=2 column.

The reference routes below are the known-good tours for this instance and
are used by the regression suite: measured with ``route_length`` the
independent tours cost 10 + 12 + 10 = 32 blocks and the collaborative
tours 10 + 8 + 6 = 24 blocks.
"""

from __future__ import annotations

import copy

from .gridworld.scenario import Scenario, parse_scenario

SHOWCASE: dict = {
    "grid": {
        "width": 5,
        "height": 5,
        "removed_edges": [],
        "single_track": [[[11, 12], [12, 13]]],
    },
    "depots": [
        {"label": "D1", "marker": 0, "trucks": [{"alias": "T1", "capacity": 5}]},
        {"label": "D2", "marker": 20, "trucks": [{"alias": "T2", "capacity": 3}]},
        {"label": "D3", "marker": 24, "trucks": [{"alias": "T3", "capacity": 3}]},
    ],
    "customers": [
        {"label": "C1", "marker": 2, "demand": 1, "carrier": "D2"},
        {"label": "C2", "marker": 8, "demand": 1, "carrier": "D1"},
        {"label": "C3", "marker": 11, "demand": 1, "carrier": "D3"},
        {"label": "C4", "marker": 22, "demand": 1, "carrier": "D2"},
        {"label": "C5", "marker": 6, "demand": 1, "carrier": "D1"},
        {"label": "C6", "marker": 13, "demand": 2, "carrier": "D1"},
        {"label": "C7", "marker": 14, "demand": 1, "carrier": "D3"},
        {"label": "C8", "marker": 18, "demand": 1, "carrier": "D3"},
        {"label": "C9", "marker": 17, "demand": 1, "carrier": "D2"},
    ],
    "timing": {"edge_ticks": 1, "service_ticks": 2},
}

# Reference tours for the demo instance, one per truck: what each carrier
# drives alone versus after pooling orders.
REFERENCE_INDEPENDENT_ROUTES: dict[str, list[int]] = {
    "T1": [0, 5, 6, 11, 12, 13, 8, 3, 2, 1, 0],
    "T2": [20, 15, 16, 11, 6, 7, 8, 13, 12, 17, 22, 21, 20],
    "T3": [24, 19, 18, 13, 12, 11, 16, 17, 22, 23, 24],
}

REFERENCE_COLLABORATIVE_ROUTES: dict[str, list[int]] = {
    "T1": [0, 5, 6, 11, 12, 13, 8, 3, 2, 1, 0],
    "T2": [20, 21, 22, 17, 12, 11, 10, 15, 20],
    "T3": [24, 19, 14, 13, 18, 23, 24],
}

# Block totals reported for the demo. The independent total of the measured
# reference routes is 32; 34 is the headline figure the demo was announced
# with (the two disagree, both are kept and reported side by side).
REPORTED_INDEPENDENT_TOTAL = 34
MEASURED_INDEPENDENT_TOTAL = 32
COLLABORATIVE_TOTAL = 24


def showcase_dict() -> dict:
    return copy.deepcopy(SHOWCASE)


def showcase_scenario() -> Scenario:
    return parse_scenario(SHOWCASE)
