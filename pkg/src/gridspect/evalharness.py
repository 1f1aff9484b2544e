"""Evaluation harness: clutter injection, precision/recall, parameter
sweeps over shape/size/count grids, and the score-vs-precision
correlation.

Ground truth comes for free: original occupied cells are structure, every
injected cell is clutter. All randomness flows from the per-row seed, so
rows are reproducible and the sweep is resumable by row key.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass

import numpy as np

from .errors import GridspectError, PlacementError, ZeroVarianceError
from .grid_map import BinaryMap
from .pipeline import PipelineConfig, declutter_map

STRUCTURE = 1
CLUTTER = 2

SHAPES = ("square", "rectangle", "random")
RANDOM_SHAPES = ("circle", "diamond", "star")

FLAG_NO_KEPT_CELLS = "NO_KEPT_CELLS"
FLAG_ROW_ERROR = "ROW_ERROR"

CSV_COLUMNS = ("map", "shape", "size", "count", "seed", "precision", "recall", "w", "s", "flags")

_MAX_PLACEMENT_ATTEMPTS = 1000


@dataclass(frozen=True)
class ClutterSpec:
    shape: str
    count: int
    size: int
    seed: int = 0

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError(f"shape must be one of {SHAPES}, got {self.shape!r}")
        if self.count <= 0:
            raise ValueError("count must be positive")
        if self.size < 2:
            raise ValueError("size must be at least 2 pixels")


@dataclass(frozen=True)
class LabeledMap:
    bits: BinaryMap
    truth: np.ndarray  # 0 free, 1 structure, 2 clutter

    def __post_init__(self):
        if self.truth.shape != self.bits.bits.shape:
            raise ValueError("truth shape does not match map")

    @property
    def structure_count(self) -> int:
        return int((self.truth == STRUCTURE).sum())

    @property
    def clutter_count(self) -> int:
        return int((self.truth == CLUTTER).sum())


@dataclass(frozen=True)
class PrResult:
    precision: float | None
    recall: float
    kept: int
    kept_structure: int
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class SweepRow:
    map_id: str
    shape: str
    size: int
    count: int
    seed: int
    precision: float | None
    recall: float | None
    w: float | None
    s: float | None
    flags: tuple[str, ...] = ()

    @property
    def key(self) -> tuple:
        return (self.map_id, self.shape, self.size, self.count, self.seed)


def shape_stencil(kind: str, size: int) -> np.ndarray:
    """Rasterize one obstacle shape into a size x size boolean stencil."""
    half = (size - 1) / 2.0
    d = np.arange(size, dtype=np.float64) - half
    dx, dy = np.meshgrid(d, d)
    r = size / 2.0
    if kind == "square":
        return np.ones((size, size), dtype=bool)
    if kind == "rectangle":
        return np.abs(dy) <= max(size / 4.0, 0.5)  # size x ~size/2 block
    if kind == "circle":
        return dx * dx + dy * dy <= r * r
    if kind == "diamond":
        return np.abs(dx) + np.abs(dy) <= r
    if kind == "star":
        # 8-pointed: diamond spikes on a smaller square body
        return (np.abs(dx) + np.abs(dy) <= r) | (
            np.maximum(np.abs(dx), np.abs(dy)) <= 0.6 * r
        )
    raise ValueError(f"unknown stencil kind {kind!r}")


def inject_clutter(m: BinaryMap, spec: ClutterSpec) -> LabeledMap:
    """Place ``count`` obstacles at uniform-random free positions.

    Each obstacle's center cell is drawn uniformly over cells that are
    free in the current map (rejection sampling, bounded attempts); the
    stencil must fit inside the map. Obstacle cells may overlap structure,
    in which case the cell keeps its STRUCTURE label. Original occupied
    cells are never removed or relabeled.
    """
    rng = np.random.default_rng(spec.seed)
    h, w = m.height, m.width
    bits = m.bits.copy()
    truth = np.where(m.bits, STRUCTURE, 0).astype(np.uint8)

    for _ in range(spec.count):
        if spec.shape == "random":
            kind = RANDOM_SHAPES[int(rng.integers(len(RANDOM_SHAPES)))]
        else:
            kind = spec.shape
        stencil = shape_stencil(kind, spec.size)
        if kind == "rectangle" and int(rng.integers(2)):
            stencil = stencil.T
        sh, sw = stencil.shape

        placed = False
        for _attempt in range(_MAX_PLACEMENT_ATTEMPTS):
            cy = int(rng.integers(h))
            cx = int(rng.integers(w))
            if bits[cy, cx]:
                continue
            y0 = cy - (sh - 1) // 2
            x0 = cx - (sw - 1) // 2
            if y0 < 0 or x0 < 0 or y0 + sh > h or x0 + sw > w:
                continue
            window = (slice(y0, y0 + sh), slice(x0, x0 + sw))
            added = stencil & ~bits[window]
            bits[window] |= stencil
            truth[window][added] = CLUTTER
            placed = True
            break
        if not placed:
            raise PlacementError(
                f"no free spot for a {spec.size}px {kind} after "
                f"{_MAX_PLACEMENT_ATTEMPTS} attempts"
            )

    return LabeledMap(bits=BinaryMap(width=w, height=h, bits=bits), truth=truth)


def precision_recall(truth: LabeledMap, decluttered) -> PrResult:
    """Score the pipeline's structure labeling against the known truth.

    Kept cells are the positive class: precision is the fraction of kept
    cells that really are structure, recall the fraction of structure
    cells that were kept. Zero kept cells leave precision undefined.
    """
    kept_bits = decluttered.bits if hasattr(decluttered, "bits") else np.asarray(decluttered)
    if kept_bits.shape != truth.truth.shape:
        raise ValueError("decluttered map shape does not match truth")
    kept = int(kept_bits.sum())
    kept_structure = int((kept_bits & (truth.truth == STRUCTURE)).sum())
    total_structure = truth.structure_count
    recall = kept_structure / total_structure if total_structure else 0.0
    if kept == 0:
        return PrResult(
            precision=None,
            recall=recall,
            kept=0,
            kept_structure=0,
            flags=(FLAG_NO_KEPT_CELLS,),
        )
    return PrResult(
        precision=kept_structure / kept,
        recall=recall,
        kept=kept,
        kept_structure=kept_structure,
    )


def sweep_grid(map_ids, shapes, sizes, counts, seeds) -> list[tuple]:
    """Full factorial row keys, in deterministic sweep order."""
    return [
        (m, sh, int(sz), int(ct), int(sd))
        for m in map_ids
        for sh in shapes
        for sz in sizes
        for ct in counts
        for sd in seeds
    ]


def _run_row(map_id, m, shape, size, count, seed, cfg) -> SweepRow:
    try:
        labeled = inject_clutter(m, ClutterSpec(shape=shape, count=count, size=size, seed=seed))
        outcome = declutter_map(labeled.bits, cfg)
        w = outcome.analysis.score.w
        flags = tuple(outcome.analysis.score.flags) + tuple(outcome.flags)
        if outcome.decluttered is None:
            return SweepRow(map_id, shape, size, count, seed, None, None, w, None, flags)
        pr = precision_recall(labeled, outcome.decluttered)
        return SweepRow(
            map_id,
            shape,
            size,
            count,
            seed,
            pr.precision,
            pr.recall,
            w,
            outcome.threshold,
            tuple(dict.fromkeys(flags + pr.flags)),
        )
    except GridspectError as exc:
        return SweepRow(
            map_id,
            shape,
            size,
            count,
            seed,
            None,
            None,
            None,
            None,
            (FLAG_ROW_ERROR, type(exc).__name__),
        )


def run_sweep(
    maps,
    shapes=SHAPES,
    sizes=(5, 15, 30),
    counts=(20, 80, 160),
    seeds=(0,),
    cfg: PipelineConfig = PipelineConfig(),
    out_csv: str | None = None,
    out_json: str | None = None,
    resume: bool = False,
) -> list[SweepRow]:
    """Run the clutter sweep over the full factorial grid.

    ``maps`` is a mapping of id -> BinaryMap. Row errors are recorded in
    the row's flags, not raised. With ``resume`` and an existing CSV,
    finished rows are loaded instead of recomputed. Results are ordered by
    row key.
    """
    maps = dict(maps)
    done: dict[tuple, SweepRow] = {}
    if resume and out_csv and os.path.exists(out_csv):
        for row in read_rows_csv(out_csv):
            done[row.key] = row

    rows = []
    for key in sweep_grid(maps.keys(), shapes, sizes, counts, seeds):
        if key in done:
            rows.append(done[key])
            continue
        map_id, shape, size, count, seed = key
        rows.append(_run_row(map_id, maps[map_id], shape, size, count, seed, cfg))

    if out_csv:
        write_rows_csv(rows, out_csv)
    if out_json:
        write_rows_json(rows, out_json)
    return rows


def _fmt(value) -> str:
    return "" if value is None else repr(float(value))


def write_rows_csv(rows, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in rows:
            writer.writerow(
                [
                    r.map_id,
                    r.shape,
                    r.size,
                    r.count,
                    r.seed,
                    _fmt(r.precision),
                    _fmt(r.recall),
                    _fmt(r.w),
                    _fmt(r.s),
                    ";".join(r.flags),
                ]
            )


def read_rows_csv(path: str) -> list[SweepRow]:
    rows = []
    with open(path, "r", newline="") as fh:
        reader = csv.DictReader(fh)
        for rec in reader:
            rows.append(
                SweepRow(
                    map_id=rec["map"],
                    shape=rec["shape"],
                    size=int(rec["size"]),
                    count=int(rec["count"]),
                    seed=int(rec["seed"]),
                    precision=float(rec["precision"]) if rec["precision"] else None,
                    recall=float(rec["recall"]) if rec["recall"] else None,
                    w=float(rec["w"]) if rec["w"] else None,
                    s=float(rec["s"]) if rec["s"] else None,
                    flags=tuple(rec["flags"].split(";")) if rec["flags"] else (),
                )
            )
    return rows


def write_rows_json(rows, path: str) -> None:
    payload = [
        {
            "map": r.map_id,
            "shape": r.shape,
            "size": r.size,
            "count": r.count,
            "seed": r.seed,
            "precision": r.precision,
            "recall": r.recall,
            "w": r.w,
            "s": r.s,
            "flags": list(r.flags),
        }
        for r in rows
    ]
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    n: int
    by_count: dict[int, float]


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    if x.size < 3:
        raise ValueError("need at least 3 samples")
    if np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        raise ZeroVarianceError("constant variable; correlation undefined")
    return float(np.corrcoef(x, y)[0, 1])


def correlation(rows) -> CorrelationResult:
    """Pearson correlation between the global score and precision.

    Rows without a defined precision or score are skipped. A per-count
    breakdown is included where a count has enough usable rows.
    """
    usable = [r for r in rows if r.precision is not None and r.w is not None]
    if len(usable) < 3:
        raise ValueError("need at least 3 rows with defined precision")
    w = np.array([r.w for r in usable], dtype=np.float64)
    p = np.array([r.precision for r in usable], dtype=np.float64)
    overall = _pearson(w, p)

    by_count: dict[int, float] = {}
    for count in sorted({r.count for r in usable}):
        sub = [r for r in usable if r.count == count]
        if len(sub) < 3:
            continue
        ws = np.array([r.w for r in sub])
        ps = np.array([r.precision for r in sub])
        try:
            by_count[count] = _pearson(ws, ps)
        except ZeroVarianceError:
            continue
    return CorrelationResult(r=overall, n=len(usable), by_count=by_count)
