"""Wall-line extraction: Hough segments, collinear clustering, alignment
to dominant directions, and the arc-cost error metric against reference
lines.

Lines are parameterized by an angle in [0, 180) and a signed
perpendicular offset from the map center. All randomness is injected via
the seed in the Hough config, so detection is reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import kernels
from .grid_map import BinaryMap
from .structure import DominantDirections

FLAG_NO_TEST_LINES = "NO_TEST_LINES"


@dataclass(frozen=True)
class HoughConfig:
    theta_step_deg: float = 1.0
    rho_step: float = 1.0
    votes: int = 20
    min_length: float = 10.0
    max_gap: int = 3
    seed: int = 0


@dataclass(frozen=True)
class Segment:
    x1: float
    y1: float
    x2: float
    y2: float

    @property
    def length(self) -> float:
        return float(np.hypot(self.x2 - self.x1, self.y2 - self.y1))

    @property
    def angle_deg(self) -> float:
        return float(np.degrees(np.arctan2(self.y2 - self.y1, self.x2 - self.x1)) % 180.0)

    @property
    def midpoint(self) -> tuple[float, float]:
        return (0.5 * (self.x1 + self.x2), 0.5 * (self.y1 + self.y2))


@dataclass(frozen=True)
class WallLine:
    """Infinite line fused from collinear segments.

    ``offset`` is the signed perpendicular distance of the line from
    ``center`` along the normal (-sin a, cos a).
    """

    angle_deg: float
    offset: float
    center: tuple[float, float]
    support: tuple[Segment, ...] = ()

    @property
    def support_length(self) -> float:
        return sum(s.length for s in self.support)

    @property
    def midpoint(self) -> tuple[float, float]:
        """Length-weighted centroid of the support; foot point if none."""
        if self.support:
            total = self.support_length
            mx = sum(s.midpoint[0] * s.length for s in self.support) / total
            my = sum(s.midpoint[1] * s.length for s in self.support) / total
            return (mx, my)
        nx, ny = _normal(self.angle_deg)
        return (self.center[0] + self.offset * nx, self.center[1] + self.offset * ny)


@dataclass(frozen=True)
class LineCost:
    test_index: int
    reference_index: int
    theta_rad: float
    translation: float
    cost: float
    degenerate: bool


@dataclass(frozen=True)
class WallEvalResult:
    mean_cost: float
    per_line_costs: tuple[LineCost, ...]
    unmatched_reference_count: int
    flags: tuple[str, ...] = ()


def _angdiff180(a: float, b: float) -> float:
    d = abs(a - b) % 180.0
    return min(d, 180.0 - d)


def _normal(angle_deg: float) -> tuple[float, float]:
    rad = np.radians(angle_deg)
    return (-float(np.sin(rad)), float(np.cos(rad)))


def _signed_offset(point, angle_deg: float, center) -> float:
    nx, ny = _normal(angle_deg)
    return (point[0] - center[0]) * nx + (point[1] - center[1]) * ny


def detect_segments(m: BinaryMap, cfg: HoughConfig = HoughConfig()) -> list[Segment]:
    """Probabilistic Hough segment detection on the occupied cells.

    Pixels are visited in a seeded random order; each vote updates a
    (theta, rho) accumulator and, once a bin reaches the vote threshold,
    the corridor through the pixel is walked with the configured gap
    tolerance. Segments shorter than ``min_length`` are discarded.
    """
    ys, xs = np.nonzero(m.bits)
    if ys.size == 0:
        return []
    rng = np.random.default_rng(cfg.seed)
    order = rng.permutation(ys.size)

    n_theta = max(1, int(round(180.0 / cfg.theta_step_deg)))
    thetas = np.arange(n_theta, dtype=np.float64) * np.radians(cfg.theta_step_deg)
    max_rho = float(np.hypot(m.width, m.height))
    n_rho = 2 * int(np.ceil(max_rho / cfg.rho_step)) + 1
    raw = kernels.hough_segments(
        np.ascontiguousarray(m.bits.astype(np.uint8)),
        np.ascontiguousarray(ys[order].astype(np.int64)),
        np.ascontiguousarray(xs[order].astype(np.int64)),
        np.cos(thetas) / cfg.rho_step,
        np.sin(thetas) / cfg.rho_step,
        -np.sin(thetas),
        np.cos(thetas),
        float(n_rho // 2) + 0.5,
        n_rho,
        int(cfg.votes),
        int(np.ceil(cfg.min_length**2)),
        int(cfg.max_gap),
    )
    return [
        Segment(float(x1), float(y1), float(x2), float(y2)) for x1, y1, x2, y2 in raw
    ]


def _fuse(cluster: list[Segment], center) -> WallLine:
    total = sum(s.length for s in cluster)
    # circular mean on doubled angles (axial data)
    vx = sum(s.length * np.cos(2.0 * np.radians(s.angle_deg)) for s in cluster)
    vy = sum(s.length * np.sin(2.0 * np.radians(s.angle_deg)) for s in cluster)
    if np.hypot(vx, vy) < 1e-12 * max(total, 1.0):
        angle = max(cluster, key=lambda s: s.length).angle_deg
    else:
        angle = float(np.degrees(np.arctan2(vy, vx)) / 2.0 % 180.0)
    offset = sum(s.length * _signed_offset(s.midpoint, angle, center) for s in cluster)
    return WallLine(
        angle_deg=angle,
        offset=offset / total,
        center=(float(center[0]), float(center[1])),
        support=tuple(cluster),
    )


def cluster_wall_lines(
    segments,
    angle_tol: float = 5.0,
    offset_tol: float = 5.0,
    center: tuple[float, float] = (0.0, 0.0),
) -> list[WallLine]:
    """Group collinear segments and fuse each group into one wall line.

    Segments join a cluster when their angle is within ``angle_tol`` of the
    cluster seed (circular, mod 180) and the perpendicular offset of their
    midpoint, measured against the seed's angle, is within ``offset_tol``.
    Fusion uses length-weighted means (circular on doubled angles).
    """
    if angle_tol <= 0 or offset_tol <= 0:
        raise ValueError("tolerances must be positive")
    ordered = sorted(
        segments, key=lambda s: (-s.length, s.x1, s.y1, s.x2, s.y2)
    )  # longest first seeds clusters; total order keeps this deterministic
    clusters: list[list[Segment]] = []
    seeds: list[tuple[float, float]] = []
    for seg in ordered:
        placed = False
        for ci, (seed_angle, seed_offset) in enumerate(seeds):
            if _angdiff180(seg.angle_deg, seed_angle) > angle_tol:
                continue
            off = _signed_offset(seg.midpoint, seed_angle, center)
            if abs(off - seed_offset) <= offset_tol:
                clusters[ci].append(seg)
                placed = True
                break
        if not placed:
            clusters.append([seg])
            seeds.append(
                (seg.angle_deg, _signed_offset(seg.midpoint, seg.angle_deg, center))
            )
    return [_fuse(cluster, center) for cluster in clusters]


def align_to_directions(
    lines,
    dirs: DominantDirections,
    snap_tol: float = 5.0,
    offset_tol: float = 5.0,
) -> list[WallLine]:
    """Snap wall lines to the dominant wall angles and merge duplicates.

    A line within ``snap_tol`` of a dominant wall angle adopts that angle
    and its offset is refit by projecting the support onto the new normal.
    Lines sharing a snapped angle with offsets within ``offset_tol`` are
    merged. Lines beyond ``snap_tol`` pass through unchanged.
    """
    if snap_tol <= 0:
        raise ValueError("snap_tol must be positive")
    wall_angles = dirs.wall_angles_deg
    snapped: list[WallLine] = []
    for line in lines:
        target = None
        if wall_angles:
            target = min(wall_angles, key=lambda a: _angdiff180(line.angle_deg, a))
            if _angdiff180(line.angle_deg, target) > snap_tol:
                target = None
        if target is None:
            snapped.append(line)
            continue
        if line.support:
            total = sum(s.length for s in line.support)
            offset = (
                sum(
                    s.length * _signed_offset(s.midpoint, target, line.center)
                    for s in line.support
                )
                / total
            )
        else:
            offset = _signed_offset(line.midpoint, target, line.center)
        snapped.append(
            WallLine(
                angle_deg=float(target),
                offset=float(offset),
                center=line.center,
                support=line.support,
            )
        )

    # merge near-parallel duplicates created by snapping
    merged: list[WallLine] = []
    for line in sorted(snapped, key=lambda l: (l.angle_deg, l.offset)):
        last = merged[-1] if merged else None
        if (
            last is not None
            and last.angle_deg == line.angle_deg
            and abs(last.offset - line.offset) <= offset_tol
        ):
            support = last.support + line.support
            w_last = max(last.support_length, 1e-12)
            w_line = max(line.support_length, 1e-12)
            offset = (last.offset * w_last + line.offset * w_line) / (w_last + w_line)
            merged[-1] = WallLine(
                angle_deg=line.angle_deg,
                offset=float(offset),
                center=line.center,
                support=support,
            )
        else:
            merged.append(line)
    return merged


def wall_error(test, reference) -> WallEvalResult:
    """Arc-cost alignment error of ``test`` lines against ``reference``.

    Each test line is matched to the reference line minimizing
    cost = theta * |T| / 2, where theta is the smallest angle between the
    two directions (radians) and |T| the perpendicular distance from the
    test line's support midpoint to the reference line. Reference lines
    never selected as a minimizer are counted unmatched. A zero cost with
    nonzero theta or |T| follows the printed formula and is flagged
    degenerate rather than patched.
    """
    reference = list(reference)
    test = list(test)
    if not reference:
        raise ValueError("reference line set is empty")
    if not test:
        return WallEvalResult(
            mean_cost=0.0,
            per_line_costs=(),
            unmatched_reference_count=len(reference),
            flags=(FLAG_NO_TEST_LINES,),
        )
    per_line: list[LineCost] = []
    matched: set[int] = set()
    for ti, line in enumerate(test):
        mid = line.midpoint
        best: LineCost | None = None
        for ri, ref in enumerate(reference):
            theta = float(np.radians(_angdiff180(line.angle_deg, ref.angle_deg)))
            tdist = abs(_signed_offset(mid, ref.angle_deg, ref.center) - ref.offset)
            cost = theta * tdist / 2.0
            # ties (cost 0 against several parallel references) resolve to
            # the geometrically closest reference
            if best is None or (cost, tdist) < (best.cost, best.translation):
                best = LineCost(
                    test_index=ti,
                    reference_index=ri,
                    theta_rad=theta,
                    translation=tdist,
                    cost=cost,
                    degenerate=cost == 0.0 and (theta > 0.0 or tdist > 0.0),
                )
        per_line.append(best)
        matched.add(best.reference_index)
    mean_cost = float(np.mean([c.cost for c in per_line]))
    return WallEvalResult(
        mean_cost=mean_cost,
        per_line_costs=tuple(per_line),
        unmatched_reference_count=len(reference) - len(matched),
    )


def load_reference_lines(path: str, center: tuple[float, float]) -> list[WallLine]:
    """Read ground-truth wall lines from a JSON document.

    Accepts a list (or an object with a ``lines`` key) of entries that are
    either ``{"angle_deg": a, "offset_cells": o}`` or segment endpoints
    ``{"p1": [x, y], "p2": [x, y]}`` / ``[x1, y1, x2, y2]``.
    """
    with open(path, "r") as fh:
        doc = json.load(fh)
    entries = doc.get("lines") if isinstance(doc, dict) else doc
    if not isinstance(entries, list):
        raise ValueError(f"{path}: expected a list of wall lines")
    lines = []
    for entry in entries:
        if isinstance(entry, dict) and "angle_deg" in entry:
            lines.append(
                WallLine(
                    angle_deg=float(entry["angle_deg"]) % 180.0,
                    offset=float(entry.get("offset_cells", entry.get("offset", 0.0))),
                    center=(float(center[0]), float(center[1])),
                )
            )
            continue
        if isinstance(entry, dict) and "p1" in entry and "p2" in entry:
            coords = [*entry["p1"], *entry["p2"]]
        elif isinstance(entry, (list, tuple)) and len(entry) == 4:
            coords = list(entry)
        else:
            raise ValueError(f"{path}: unrecognized wall-line entry {entry!r}")
        seg = Segment(*(float(v) for v in coords))
        lines.append(
            WallLine(
                angle_deg=seg.angle_deg,
                offset=_signed_offset(seg.midpoint, seg.angle_deg, center),
                center=(float(center[0]), float(center[1])),
                support=(seg,),
            )
        )
    return lines
