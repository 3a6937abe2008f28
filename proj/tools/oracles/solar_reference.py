#!/usr/bin/env python3
"""Print reference sun positions (geometric elevation, no refraction) using pvlib SPA."""
import pandas as pd
import pvlib

CASES = [
    ("2021-06-21T17:00:00Z", 40.0, -74.5),
    ("2019-12-21T16:30:00Z", 39.9, -74.6),
    ("2023-09-23T10:00:00Z", -33.9, 18.4),
    ("2015-02-10T02:00:00Z", 35.7, 139.7),
    ("2030-07-04T21:00:00Z", 47.6, -122.3),
]

for utc, lat, lon in CASES:
    t = pd.DatetimeIndex([pd.Timestamp(utc)])
    p = pvlib.solarposition.spa_python(t, lat, lon)
    el = float(p["elevation"].iloc[0])
    az = float(p["azimuth"].iloc[0])
    print(f'{{"{utc}", {lat}, {lon}, {el:.4f}, {az:.4f}}},')
