"""Synthetic structured maps bundled with the package.

These stand in for large external map corpora in tests, benchmarks and
the evaluation harness: a rectilinear office, an apartment rotated 30
degrees, a floor plan mixing axis-aligned and diagonal walls, and a small
single room. All generators are deterministic; ``python -m
gridspect.synthmaps`` regenerates the PGM files shipped in ``data/``.
"""

from __future__ import annotations

import importlib.resources

import numpy as np

from .grid_map import BinaryMap, save_map


def draw_wall(bits: np.ndarray, p1, p2, thickness: float = 2.0) -> None:
    """Rasterize a thick segment: cells within thickness/2 of it (in place)."""
    x1, y1 = float(p1[0]), float(p1[1])
    x2, y2 = float(p2[0]), float(p2[1])
    h, w = bits.shape
    r = thickness / 2.0
    xmin = max(int(np.floor(min(x1, x2) - r)), 0)
    xmax = min(int(np.ceil(max(x1, x2) + r)), w - 1)
    ymin = max(int(np.floor(min(y1, y2) - r)), 0)
    ymax = min(int(np.ceil(max(y1, y2) + r)), h - 1)
    if xmin > xmax or ymin > ymax:
        return
    ys, xs = np.mgrid[ymin : ymax + 1, xmin : xmax + 1]
    vx = x2 - x1
    vy = y2 - y1
    norm2 = vx * vx + vy * vy
    if norm2 == 0.0:
        t = np.zeros_like(xs, dtype=np.float64)
    else:
        t = np.clip(((xs - x1) * vx + (ys - y1) * vy) / norm2, 0.0, 1.0)
    dx = xs - (x1 + t * vx)
    dy = ys - (y1 + t * vy)
    bits[ymin : ymax + 1, xmin : xmax + 1] |= dx * dx + dy * dy <= r * r


def _polyline(bits, points, thickness, closed=False):
    pts = list(points)
    if closed:
        pts.append(pts[0])
    for p1, p2 in zip(pts[:-1], pts[1:]):
        draw_wall(bits, p1, p2, thickness)


def rectangle_map(
    side: int = 128,
    margin: int = 20,
    thickness: float = 2.0,
    angle_deg: float = 0.0,
) -> BinaryMap:
    """Rectangle outline, optionally rotated about the map center."""
    bits = np.zeros((side, side), dtype=bool)
    lo = float(margin)
    hi = float(side - 1 - margin)
    corners = np.array([[lo, lo], [hi, lo], [hi, hi], [lo, hi]], dtype=np.float64)
    if angle_deg:
        c = (side - 1) / 2.0
        rad = np.radians(angle_deg)
        rot = np.array(
            [[np.cos(rad), -np.sin(rad)], [np.sin(rad), np.cos(rad)]]
        )
        corners = (corners - c) @ rot.T + c
    _polyline(bits, corners, thickness, closed=True)
    return BinaryMap(width=side, height=side, bits=bits)


def office_map(side: int = 160) -> BinaryMap:
    """Rectilinear office: border, two corridors, rooms with door gaps."""
    bits = np.zeros((side, side), dtype=bool)
    t = 2.0
    lo, hi = 6.0, side - 7.0
    _polyline(bits, [(lo, lo), (hi, lo), (hi, hi), (lo, hi)], t, closed=True)
    # corridor walls, each with one door gap
    y1, y2 = 55.0, 104.0
    draw_wall(bits, (lo, y1), (70.0, y1), t)
    draw_wall(bits, (82.0, y1), (hi, y1), t)
    draw_wall(bits, (lo, y2), (100.0, y2), t)
    draw_wall(bits, (112.0, y2), (hi, y2), t)
    # rooms above the upper corridor
    draw_wall(bits, (55.0, lo), (55.0, y1), t)
    draw_wall(bits, (104.0, lo), (104.0, y1), t)
    # rooms below the lower corridor
    draw_wall(bits, (45.0, y2), (45.0, hi), t)
    draw_wall(bits, (83.0, y2), (83.0, hi), t)
    draw_wall(bits, (121.0, y2), (121.0, hi), t)
    return BinaryMap(width=side, height=side, bits=bits)


def apartment_map(side: int = 160, angle_deg: float = 30.0) -> BinaryMap:
    """Apartment outline with two interior walls, rotated as a whole."""
    bits = np.zeros((side, side), dtype=bool)
    t = 2.0
    c = (side - 1) / 2.0
    hw, hh = 55.0, 40.0  # half extents
    walls = [
        ((-hw, -hh), (hw, -hh)),
        ((hw, -hh), (hw, hh)),
        ((hw, hh), (-hw, hh)),
        ((-hw, hh), (-hw, -hh)),
        ((-15.0, -hh), (-15.0, 5.0)),  # interior partition
        ((-15.0, 18.0), (-15.0, hh)),
        ((20.0, -5.0), (hw, -5.0)),  # interior partition
    ]
    rad = np.radians(angle_deg)
    rot = np.array([[np.cos(rad), -np.sin(rad)], [np.sin(rad), np.cos(rad)]])
    for p1, p2 in walls:
        q1 = np.array(p1) @ rot.T + c
        q2 = np.array(p2) @ rot.T + c
        draw_wall(bits, q1, q2, t)
    return BinaryMap(width=side, height=side, bits=bits)


def multi_angle_map(side: int = 160) -> BinaryMap:
    """Floor plan with an axis-aligned room and a 45-degree corridor."""
    bits = np.zeros((side, side), dtype=bool)
    t = 2.0
    walls = [
        # room (axis-aligned, open towards the corridor)
        ((8.0, 8.0), (100.0, 8.0)),
        ((8.0, 100.0), (60.0, 100.0)),
        ((8.0, 8.0), (8.0, 100.0)),
        ((100.0, 8.0), (100.0, 50.0)),
        # diagonal corridor walls (parallel, 45 degrees)
        ((60.0, 100.0), (110.0, 150.0)),
        ((100.0, 50.0), (150.0, 100.0)),
    ]
    for p1, p2 in walls:
        draw_wall(bits, p1, p2, t)
    return BinaryMap(width=side, height=side, bits=bits)


def room_map(side: int = 64) -> BinaryMap:
    """Small single room with one partition; the bundled 64x64 sample."""
    bits = np.zeros((side, side), dtype=bool)
    t = 2.0
    lo, hi = 8.0, side - 9.0
    _polyline(bits, [(lo, lo), (hi, lo), (hi, hi), (lo, hi)], t, closed=True)
    draw_wall(bits, (30.0, lo), (30.0, 32.0), t)
    return BinaryMap(width=side, height=side, bits=bits)


def scatter_occupied(m: BinaryMap, seed: int) -> BinaryMap:
    """Relocate all occupied cells uniformly at random (structure destroyed)."""
    rng = np.random.default_rng(seed)
    n = m.occupied_count
    flat = rng.choice(m.width * m.height, size=n, replace=False)
    bits = np.zeros(m.height * m.width, dtype=bool)
    bits[flat] = True
    return BinaryMap(width=m.width, height=m.height, bits=bits.reshape(m.height, m.width))


BUNDLED_MAPS = {
    "office_rect": office_map,
    "apartment_rot30": apartment_map,
    "floor_multi": multi_angle_map,
    "room64": room_map,
}


def bundled_map(name: str) -> BinaryMap:
    try:
        return BUNDLED_MAPS[name]()
    except KeyError:
        raise KeyError(
            f"unknown bundled map {name!r}; available: {sorted(BUNDLED_MAPS)}"
        ) from None


def bundled_corpus() -> dict[str, BinaryMap]:
    """The three structured evaluation maps (room64 is I/O-test only)."""
    return {
        name: BUNDLED_MAPS[name]()
        for name in ("office_rect", "apartment_rot30", "floor_multi")
    }


def data_path(name: str):
    """Filesystem path of a bundled PGM (for file-based loading)."""
    return importlib.resources.files("gridspect.data").joinpath(f"{name}.pgm")


def _regenerate(out_dir: str) -> None:
    import os

    os.makedirs(out_dir, exist_ok=True)
    for name, gen in BUNDLED_MAPS.items():
        save_map(gen(), os.path.join(out_dir, f"{name}.pgm"))


if __name__ == "__main__":
    import sys

    _regenerate(sys.argv[1] if len(sys.argv) > 1 else "src/gridspect/data")
