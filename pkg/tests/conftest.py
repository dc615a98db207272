import json

import numpy as np
import pytest

from trackmetrics.io import parse_zone_config
from trackmetrics.model import BoundingBox, DetectionRecord

VENUE = {
    "camera": "cam1",
    "zones": [
        {"id": "seating", "name": "Seating", "priority": 1,
         "vertices": [[100, 400], [500, 400], [500, 700], [100, 700]]},
        {"id": "store", "name": "Storefront", "priority": 2,
         "vertices": [[600, 100], [880, 100], [880, 350], [600, 350]]},
        {"id": "aisle", "name": "Aisle", "priority": 3,
         "vertices": [[550, 400], [1200, 400], [1200, 700], [550, 700]]},
    ],
    "gates": {
        "start": {"x": 900, "y": 80, "w": 80, "h": 200},
        "finish": {"x": 1150, "y": 80, "w": 80, "h": 200},
    },
    "dwell_zones": ["seating"],
}


@pytest.fixture
def venue_doc():
    return json.loads(json.dumps(VENUE))


@pytest.fixture
def venue(venue_doc):
    return parse_zone_config(venue_doc)


@pytest.fixture
def zones_file(tmp_path, venue_doc):
    p = tmp_path / "zones.json"
    p.write_text(json.dumps(venue_doc))
    return p


def rec(ts_ms, x, y, w=40.0, h=100.0, track=1, camera="cam1", category="person"):
    return DetectionRecord(int(ts_ms), camera, track, BoundingBox(x, y, w, h), category)


def star_polygon(rng, k=None, center=(0.0, 0.0), r_lo=0.3, r_hi=1.0):
    """Random simple polygon: vertices at sorted angles with random radii."""
    k = k or int(rng.integers(3, 12))
    angles = np.sort(rng.uniform(0, 2 * np.pi, k))
    while np.any(np.diff(np.append(angles, angles[0] + 2 * np.pi)) >= np.pi):
        angles = np.sort(rng.uniform(0, 2 * np.pi, k))
    radii = rng.uniform(r_lo, r_hi, k)
    return [(center[0] + r * np.cos(a), center[1] + r * np.sin(a)) for a, r in zip(angles, radii)]
