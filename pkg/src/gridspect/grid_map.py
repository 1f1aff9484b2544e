"""Occupancy-grid maps: loading, binarization, padding and saving.

Input images follow the usual robot-map convention: dark pixels are
occupied. A pixel value v maps to occupancy p = (255 - v) / 255, and
cells whose occupancy falls strictly between the free and occupied
thresholds are stored as unknown (NaN).
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
import yaml
from PIL import Image

from .errors import MapFormatError

DEFAULT_RESOLUTION = 0.05
DEFAULT_OCCUPIED_THRESH = 0.65
DEFAULT_FREE_THRESH = 0.196


@dataclass(frozen=True)
class OccupancyGrid:
    """Real-valued occupancy map; cells hold values in [0, 1] or NaN (unknown)."""

    width: int
    height: int
    cells: np.ndarray
    resolution: float = DEFAULT_RESOLUTION

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("map dimensions must be positive")
        if self.cells.shape != (self.height, self.width):
            raise ValueError("cells shape does not match declared dimensions")
        known = self.cells[~np.isnan(self.cells)]
        if known.size and (known.min() < 0.0 or known.max() > 1.0):
            raise ValueError("occupancy values must lie in [0, 1]")
        self.cells.flags.writeable = False

    @property
    def unknown_mask(self) -> np.ndarray:
        return np.isnan(self.cells)


@dataclass(frozen=True)
class BinaryMap:
    """Boolean occupancy map; True marks an occupied cell."""

    width: int
    height: int
    bits: np.ndarray

    def __post_init__(self):
        if self.bits.dtype != np.bool_:
            raise ValueError("bits must be boolean")
        if self.bits.shape != (self.height, self.width):
            raise ValueError("bits shape does not match declared dimensions")
        self.bits.flags.writeable = False

    @property
    def occupied_count(self) -> int:
        return int(self.bits.sum())


def _read_pgm(path: str) -> np.ndarray:
    """Parse an 8-bit P2/P5 PGM file into a uint8 array."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:2] not in (b"P2", b"P5"):
        raise MapFormatError(f"{path}: not a P2/P5 PGM file")
    magic = data[:2].decode()

    # Tokenize the header, honouring '#' comments.
    pos = 2
    tokens = []
    while len(tokens) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise MapFormatError(f"{path}: truncated PGM header")
        if data[pos : pos + 1] == b"#":
            eol = data.find(b"\n", pos)
            pos = len(data) if eol < 0 else eol + 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise MapFormatError(f"{path}: malformed PGM header") from exc
    if width <= 0 or height <= 0:
        raise MapFormatError(f"{path}: non-positive PGM dimensions")
    if maxval > 255:
        raise MapFormatError(f"{path}: only 8-bit PGM is supported (maxval {maxval})")

    if magic == "P5":
        pos += 1  # single whitespace byte after maxval
        raw = data[pos : pos + width * height]
        if len(raw) < width * height:
            raise MapFormatError(f"{path}: truncated PGM pixel data")
        pixels = np.frombuffer(raw, dtype=np.uint8).reshape(height, width)
    else:
        try:
            values = np.array(data[pos:].split(), dtype=np.int64)
        except ValueError as exc:
            raise MapFormatError(f"{path}: malformed P2 pixel data") from exc
        if values.size < width * height:
            raise MapFormatError(f"{path}: truncated PGM pixel data")
        pixels = values[: width * height].reshape(height, width).astype(np.uint8)
    if maxval != 255:
        pixels = np.round(pixels.astype(np.float64) * (255.0 / maxval)).astype(np.uint8)
    return pixels


def _read_png(path: str) -> np.ndarray:
    try:
        img = Image.open(path)
    except Exception as exc:
        raise MapFormatError(f"{path}: unreadable image ({exc})") from exc
    if img.mode == "1":
        img = img.convert("L")
    if img.mode != "L":
        raise MapFormatError(
            f"{path}: unsupported image mode {img.mode!r}; 8-bit grayscale expected"
        )
    return np.asarray(img, dtype=np.uint8)


def _read_sidecar(meta_path: str) -> dict:
    try:
        with open(meta_path, "r") as fh:
            parsed = yaml.safe_load(fh)
    except OSError as exc:
        raise MapFormatError(f"{meta_path}: unreadable metadata ({exc})") from exc
    except yaml.YAMLError as exc:
        raise MapFormatError(f"{meta_path}: malformed metadata ({exc})") from exc
    if parsed is None:
        return {}
    if not isinstance(parsed, dict):
        raise MapFormatError(f"{meta_path}: metadata must be a key/value mapping")
    return parsed


def load_map(
    path: str,
    meta: str | None = None,
    occupied_thresh: float | None = None,
    free_thresh: float | None = None,
) -> OccupancyGrid:
    """Load a grayscale PGM/PNG map into an occupancy grid.

    An optional YAML sidecar can override ``resolution``, ``occupied_thresh``
    and ``free_thresh``; explicit keyword arguments take precedence over the
    sidecar. Pixels whose occupancy falls strictly between the two thresholds
    become unknown cells.
    """
    if not os.path.exists(path):
        raise MapFormatError(f"{path}: no such file")
    ext = os.path.splitext(path)[1].lower()
    if ext in (".pgm", ".pnm"):
        pixels = _read_pgm(path)
    elif ext == ".png":
        pixels = _read_png(path)
    else:
        raise MapFormatError(f"{path}: unsupported format {ext!r} (PGM/PNG expected)")

    resolution = DEFAULT_RESOLUTION
    occ = DEFAULT_OCCUPIED_THRESH
    free = DEFAULT_FREE_THRESH
    if meta is not None:
        sidecar = _read_sidecar(meta)
        resolution = float(sidecar.get("resolution", resolution))
        occ = float(sidecar.get("occupied_thresh", occ))
        free = float(sidecar.get("free_thresh", free))
        for key, actual in (("width", pixels.shape[1]), ("height", pixels.shape[0])):
            if key in sidecar and int(sidecar[key]) != actual:
                raise MapFormatError(
                    f"{meta}: {key} {sidecar[key]} does not match image {key} {actual}"
                )
    if occupied_thresh is not None:
        occ = occupied_thresh
    if free_thresh is not None:
        free = free_thresh
    if not (0.0 <= free < occ <= 1.0):
        raise MapFormatError(f"invalid thresholds: free {free}, occupied {occ}")

    occupancy = (255.0 - pixels.astype(np.float64)) / 255.0
    unknown = (occupancy > free) & (occupancy < occ)
    occupancy[unknown] = np.nan
    h, w = occupancy.shape
    return OccupancyGrid(width=w, height=h, cells=occupancy, resolution=resolution)


def binarize(grid: OccupancyGrid, occupied_threshold: float = DEFAULT_OCCUPIED_THRESH) -> BinaryMap:
    """Threshold the grid; unknown cells count as unoccupied."""
    if not (0.0 < occupied_threshold < 1.0):
        raise ValueError("occupied_threshold must lie in (0, 1)")
    with np.errstate(invalid="ignore"):
        bits = grid.cells >= occupied_threshold
    bits &= ~np.isnan(grid.cells)
    return BinaryMap(width=grid.width, height=grid.height, bits=bits)


def pad_to_square(m: BinaryMap) -> tuple[BinaryMap, tuple[int, int]]:
    """Center the map on a square canvas of side max(width, height).

    Returns the padded map and the (x, y) offset of the original top-left
    corner, for mapping per-cell results back to the input frame.
    """
    side = max(m.width, m.height)
    off_x = (side - m.width) // 2
    off_y = (side - m.height) // 2
    if side == m.width == m.height:
        return m, (0, 0)
    bits = np.zeros((side, side), dtype=bool)
    bits[off_y : off_y + m.height, off_x : off_x + m.width] = m.bits
    return BinaryMap(width=side, height=side, bits=bits), (off_x, off_y)


def _to_pixels(obj) -> np.ndarray:
    """Render a map-like object to uint8 pixels (occupied=0, free=255)."""
    if hasattr(obj, "bits"):
        arr = obj.bits
    elif hasattr(obj, "scores"):
        arr = obj.scores
    else:
        arr = np.asarray(obj)
    if arr.dtype == np.bool_:
        return np.where(arr, 0, 255).astype(np.uint8)
    arr = arr.astype(np.float64)
    lo, hi = float(arr.min()), float(arr.max())
    if hi == lo:
        return np.zeros(arr.shape, dtype=np.uint8)  # constant field maps to 0
    return np.round(255.0 * (arr - lo) / (hi - lo)).astype(np.uint8)


def save_map(map_obj, path: str, fmt: str | None = None) -> None:
    """Write a binary or real-valued map as PGM (P5) or PNG.

    Binary maps use occupied=0 / free=255 and round-trip bit-exactly through
    :func:`load_map` + :func:`binarize`. Real-valued maps are min-max scaled
    to 0..255 (a constant map becomes all zeros).
    """
    if fmt is None:
        ext = os.path.splitext(path)[1].lower()
        fmt = {".pgm": "pgm", ".pnm": "pgm", ".png": "png"}.get(ext)
        if fmt is None:
            raise MapFormatError(f"{path}: cannot infer format from extension")
    pixels = _to_pixels(map_obj)
    h, w = pixels.shape
    try:
        if fmt == "pgm":
            with open(path, "wb") as fh:
                fh.write(b"P5\n%d %d\n255\n" % (w, h))
                fh.write(pixels.tobytes())
        elif fmt == "png":
            Image.fromarray(pixels, mode="L").save(path, format="PNG")
        else:
            raise MapFormatError(f"unsupported output format {fmt!r}")
    except OSError as exc:
        raise MapFormatError(f"{path}: write failed ({exc})") from exc
