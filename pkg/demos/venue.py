"""A small food-court style venue shared by the demo scripts."""

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
