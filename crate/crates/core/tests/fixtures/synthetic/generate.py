"""Writes the six-region synthetic fixture: boundaries, settlement grid,
region table and run config. Coordinates are projected meters."""

import json
from pathlib import Path

import numpy as np

HERE = Path(__file__).parent
CELL = 500.0
X0, Y0 = 500_000.0, 9_100_000.0
NCOLS, NROWS = 120, 60
NODATA = -9999.0

# (id, name, level, population, case_rate, admin_area_scale, outer rings, holes)
# The scale mimics official areas that differ slightly from the digitized ones.
REGIONS = [
    ("R01", "Kabupaten Alpha", "regency", 410_000, 74.5, 1.0,
     [[(0, 0), (10_000, 0), (10_000, 8_000), (0, 8_000)]], []),
    ("R02", "Kabupaten Beta", "regency", 520_000, 61.0, 1.008,
     [[(12_000, 0), (24_000, 0), (24_000, 4_000), (16_000, 4_000), (16_000, 10_000), (12_000, 10_000)]], []),
    ("R03", "Kabupaten Gamma", "regency", 365_000, 83.1, 0.994,
     [[(26_000, 0), (38_000, 0), (38_000, 10_000), (26_000, 10_000)]],
     [[(29_000, 3_000), (29_000, 7_000), (35_000, 7_000), (35_000, 3_000)]]),
    # administrative area overstated: its pixel-size estimate is an outlier
    ("R04", "Kabupaten Delta", "regency", 290_000, 39.9, 1.3,
     [[(40_000, 0), (52_000, 0), (52_000, 9_000), (40_000, 9_000)]], []),
    ("R05", "Kota Epsilon", "municipality", 610_000, 48.2, 1.004,
     [[(0, 12_000), (6_000, 12_000), (6_000, 18_000), (0, 18_000)]], []),
    ("R06", "Kota Zeta", "municipality", 480_000, 95.3, 1.0,
     [[(10_000, 12_000), (16_000, 12_000), (20_250, 16_000), (16_000, 20_000), (10_000, 20_000)]], []),
]

# settlement blobs per region: (center x, center y, radius) in local meters
BLOBS = {
    "R01": [(3_000, 3_000, 1_800), (7_500, 6_000, 1_200)],
    "R02": [(14_000, 2_000, 1_600), (21_000, 2_000, 1_300), (14_000, 8_000, 1_000)],
    "R03": [(27_500, 1_500, 1_200), (36_500, 8_500, 1_400)],
    "R04": [(46_000, 4_500, 2_000)],
    "R05": [(3_000, 15_000, 2_600)],
    "R06": [(12_500, 15_000, 2_400)],
}


def shift(ring):
    return [[X0 + 2_000 + x, Y0 + 2_000 + y] for x, y in ring]


def shoelace(ring):
    a = 0.0
    for (x1, y1), (x2, y2) in zip(ring, ring[1:] + ring[:1]):
        a += x1 * y2 - x2 * y1
    return abs(a) / 2.0


def main():
    features = []
    rows = []
    for rid, name, level, pop, rate, scale, outers, holes in REGIONS:
        rings = [shift(r) for r in outers]
        hole_rings = [shift(h) for h in holes]
        coords = [rings[0] + [rings[0][0]]] + [h + [h[0]] for h in hole_rings]
        features.append({
            "type": "Feature",
            "properties": {"region_id": rid, "name": name},
            "geometry": {"type": "Polygon", "coordinates": coords},
        })
        area_m2 = sum(shoelace(r) for r in outers) - sum(shoelace(h) for h in holes)
        rows.append((rid, name, level, "Synthetica", pop, area_m2 / 1e6 * scale, rate))

    (HERE / "boundaries.geojson").write_text(
        json.dumps({"type": "FeatureCollection", "features": features}, indent=1) + "\n")

    # settlement probability grid, row 0 at the top as in the file
    xs = X0 + (np.arange(NCOLS) + 0.5) * CELL
    ys = Y0 + (NROWS - np.arange(NROWS) - 0.5) * CELL
    gx, gy = np.meshgrid(xs, ys)
    grid = np.zeros((NROWS, NCOLS))
    for blobs in BLOBS.values():
        for cx, cy, r in blobs:
            d = np.hypot(gx - (X0 + 2_000 + cx), gy - (Y0 + 2_000 + cy))
            grid = np.maximum(grid, np.clip(1.2 - d / r, 0.0, 1.0))
    grid = np.round(grid, 3)
    grid[0, :5] = NODATA
    grid[NROWS - 1, NCOLS - 3:] = NODATA
    lines = [
        f"NCOLS {NCOLS}", f"NROWS {NROWS}",
        f"XLLCORNER {X0:.1f}", f"YLLCORNER {Y0:.1f}",
        f"CELLSIZE {CELL:.1f}", f"NODATA_VALUE {NODATA:.0f}",
    ]
    lines += [" ".join(f"{v:g}" for v in row) for row in grid]
    (HERE / "settlement.asc").write_text("\n".join(lines) + "\n")

    with open(HERE / "regions.csv", "w") as f:
        f.write("region_id,name,level,province,population,admin_area_km2,case_rate_per_100k\n")
        for r in rows:
            f.write(f"{r[0]},{r[1]},{r[2]},{r[3]},{r[4]},{r[5]:.4f},{r[6]}\n")


if __name__ == "__main__":
    main()
