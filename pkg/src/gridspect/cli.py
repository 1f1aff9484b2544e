"""Command-line interface.

Subcommands: analyze, declutter, walls, inject, sweep, correlate.
Exit codes: 0 ok, 2 input error, 3 no structure, 4 no separation.
All outputs (JSON, CSV, images) are deterministic given flags and seeds.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np
import yaml
from PIL import Image

from . import __version__
from .errors import GridspectError, MapFormatError
from .evalharness import (
    SHAPES,
    ClutterSpec,
    correlation,
    inject_clutter,
    read_rows_csv,
    run_sweep,
)
from .global_score import NO_STRUCTURE_FLAG
from .grid_map import binarize, load_map, save_map
from .pipeline import FLAG_NO_SEPARATION, PipelineConfig, analyze_map, declutter_map
from .spectral import save_amplitude_png, save_polar_png
from .synthmaps import bundled_map
from .wall_lines import HoughConfig, align_to_directions, cluster_wall_lines, detect_segments, load_reference_lines, wall_error

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_NO_STRUCTURE = 3
EXIT_NO_SEPARATION = 4

_CONFIG_KEYS = (
    "occupied_thresh",
    "free_thresh",
    "angle_bins",
    "radius_bins",
    "prominence_threshold",
    "prominence_mode",
    "half_width_deg",
    "gmm_max_iter",
    "gmm_tol",
)


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, "r") as fh:
            doc = yaml.safe_load(fh)
    except (OSError, yaml.YAMLError) as exc:
        raise MapFormatError(f"{path}: cannot read config ({exc})") from exc
    if doc is None:
        return {}
    if not isinstance(doc, dict):
        raise MapFormatError(f"{path}: config must be a key/value mapping")
    return doc


def _pipeline_config(args, file_cfg: dict) -> PipelineConfig:
    values = {}
    for key in _CONFIG_KEYS:
        flag_val = getattr(args, key, None)
        if flag_val is not None:
            values[key] = flag_val
        elif key in file_cfg:
            values[key] = file_cfg[key]
    return PipelineConfig(**values)


def _add_pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML config file; flags override its keys")
    p.add_argument("--occupied-threshold", dest="occupied_thresh", type=float)
    p.add_argument("--free-threshold", dest="free_thresh", type=float)
    p.add_argument("--angle-bins", dest="angle_bins", type=int)
    p.add_argument("--radius-bins", dest="radius_bins", type=int)
    p.add_argument("--prominence-threshold", dest="prominence_threshold", type=float)
    p.add_argument(
        "--prominence-mode", dest="prominence_mode", choices=("circular", "linear")
    )
    p.add_argument("--half-width", dest="half_width_deg", type=float)
    p.add_argument("--meta", help="YAML sidecar with resolution/thresholds")


def _load_binary(path: str, meta: str | None, cfg: PipelineConfig):
    if path.startswith("bundled:"):
        return bundled_map(path.split(":", 1)[1])
    grid = load_map(
        path, meta=meta, occupied_thresh=cfg.occupied_thresh, free_thresh=cfg.free_thresh
    )
    return binarize(grid, cfg.occupied_thresh)


def _emit_json(report: dict, dest: str | None) -> None:
    text = json.dumps(report, indent=2) + "\n"
    if dest is None or dest == "-":
        sys.stdout.write(text)
    else:
        with open(dest, "w") as fh:
            fh.write(text)


def _rounded(value, digits):
    return None if value is None else round(float(value), digits)


def _direction_block(dirs) -> list[dict]:
    return [
        {
            "spectral_angle_deg": _rounded(p.spectral_angle_deg, 2),
            "wall_angle_deg": _rounded(p.wall_angle_deg, 2),
            "prominence": _rounded(p.prominence, 4),
            "profile_value": _rounded(p.profile_value, 4),
            "unpaired": p.unpaired,
        }
        for p in dirs.peaks
    ]


def _score_block(score) -> dict:
    return {
        "w": _rounded(score.w, 3),
        "trust": score.trust,
        "mean_scaled_profile": _rounded(score.mean_scaled_profile, 6),
        "mean_scaled_peak": _rounded(score.mean_scaled_peak, 6),
        "n_peaks": score.n_peaks,
        "flags": list(score.flags),
    }


def _gmm_block(fit) -> dict | None:
    if fit is None:
        return None
    return {
        "means": [_rounded(v, 6) for v in fit.means],
        "variances": [_rounded(v, 9) for v in fit.variances],
        "weights": [_rounded(v, 6) for v in fit.weights],
        "tau": _rounded(fit.tau, 6),
        "threshold": _rounded(fit.threshold_s, 6),
        "iterations": fit.iterations,
        "converged": fit.converged,
        "flags": list(fit.flags),
    }


def _base_report(path: str, m, cfg: PipelineConfig) -> dict:
    return {
        "tool": {"name": "gridspect", "version": __version__},
        "input": {
            "path": path,
            "width": m.width,
            "height": m.height,
            "occupied_cells": m.occupied_count,
        },
        "config": cfg.echo(),
    }


def _render_profile_png(profile_values: np.ndarray, path: str, height: int = 200) -> None:
    v = np.asarray(profile_values, dtype=np.float64)
    lo, hi = float(v.min()), float(v.max())
    scaled = np.zeros_like(v) if hi == lo else (v - lo) / (hi - lo)
    rows = np.arange(height)[:, None]
    cutoff = np.round((1.0 - scaled) * (height - 1)).astype(int)[None, :]
    img = np.where(rows >= cutoff, 255, 0).astype(np.uint8)
    Image.fromarray(img, mode="L").save(path, format="PNG")


def cmd_analyze(args) -> int:
    cfg = _pipeline_config(args, _load_config_file(args.config))
    m = _load_binary(args.map, args.meta, cfg)
    analysis = analyze_map(m, cfg)
    report = _base_report(args.map, m, cfg)
    report["directions"] = _direction_block(analysis.dirs)
    report["global_score"] = _score_block(analysis.score)
    if args.spectrum_out:
        save_amplitude_png(analysis.spectrum, args.spectrum_out)
    if args.polar_out:
        save_polar_png(analysis.polar, args.polar_out)
    if args.profile_out:
        _render_profile_png(analysis.profile.values, args.profile_out)
    _emit_json(report, args.json)
    if NO_STRUCTURE_FLAG in analysis.score.flags:
        return EXIT_NO_STRUCTURE
    return EXIT_OK


def cmd_declutter(args) -> int:
    cfg = _pipeline_config(args, _load_config_file(args.config))
    m = _load_binary(args.map, args.meta, cfg)
    outcome = declutter_map(m, cfg, threshold_override=args.threshold)
    report = _base_report(args.map, m, cfg)
    report["directions"] = _direction_block(outcome.analysis.dirs)
    report["global_score"] = _score_block(outcome.analysis.score)
    report["gmm"] = _gmm_block(outcome.fit)
    report["threshold"] = _rounded(outcome.threshold, 6)
    report["pixels"] = {"kept": outcome.kept, "removed": outcome.removed}
    report["flags"] = list(outcome.flags)

    if outcome.decluttered is None:
        _emit_json(report, args.json)
        return EXIT_NO_STRUCTURE
    if args.output:
        save_map(outcome.decluttered, args.output)
    if args.score_out and outcome.nominal is not None:
        save_map(outcome.nominal, args.score_out)
    _emit_json(report, args.json)
    if FLAG_NO_SEPARATION in outcome.flags:
        return EXIT_NO_SEPARATION
    return EXIT_OK


def _line_block(lines) -> list[dict]:
    return [
        {
            "angle_deg": _rounded(line.angle_deg, 2),
            "offset_cells": _rounded(line.offset, 2),
            "support_segments": len(line.support),
            "support_length": _rounded(line.support_length, 2),
        }
        for line in lines
    ]


def cmd_walls(args) -> int:
    cfg = _pipeline_config(args, _load_config_file(args.config))
    m = _load_binary(args.map, args.meta, cfg)
    center = ((m.width - 1) / 2.0, (m.height - 1) / 2.0)
    hough = HoughConfig(
        votes=args.votes, min_length=args.min_length, max_gap=args.max_gap, seed=args.seed
    )
    report = _base_report(args.map, m, cfg)
    flags: list[str] = []

    if args.no_filter:
        segments = detect_segments(m, hough)
        lines = cluster_wall_lines(
            segments, angle_tol=args.angle_tol, offset_tol=args.offset_tol, center=center
        )
        report["filtered"] = False
    else:
        outcome = declutter_map(m, cfg)
        report["global_score"] = _score_block(outcome.analysis.score)
        flags.extend(outcome.flags)
        if outcome.decluttered is None:
            report["flags"] = flags
            _emit_json(report, args.json)
            return EXIT_NO_STRUCTURE
        segments = detect_segments(outcome.decluttered, hough)
        lines = cluster_wall_lines(
            segments, angle_tol=args.angle_tol, offset_tol=args.offset_tol, center=center
        )
        lines = align_to_directions(
            lines, outcome.analysis.dirs, snap_tol=args.snap_tol, offset_tol=args.offset_tol
        )
        report["filtered"] = True

    report["segments"] = len(segments)
    report["lines"] = _line_block(lines)
    report["flags"] = flags

    if args.gt:
        reference = load_reference_lines(args.gt, center)
        if not reference:
            raise MapFormatError(f"{args.gt}: ground-truth line set is empty")
        result = wall_error(lines, reference)
        report["wall_eval"] = {
            "mean_cost": _rounded(result.mean_cost, 6),
            "unmatched_reference_count": result.unmatched_reference_count,
            "flags": list(result.flags),
            "per_line": [
                {
                    "test_index": c.test_index,
                    "reference_index": c.reference_index,
                    "theta_rad": _rounded(c.theta_rad, 6),
                    "translation": _rounded(c.translation, 4),
                    "cost": _rounded(c.cost, 6),
                    "degenerate": c.degenerate,
                }
                for c in result.per_line_costs
            ],
        }
    _emit_json(report, args.json)
    return EXIT_OK


def cmd_inject(args) -> int:
    cfg = _pipeline_config(args, _load_config_file(args.config))
    m = _load_binary(args.map, args.meta, cfg)
    spec = ClutterSpec(shape=args.shape, count=args.count, size=args.size, seed=args.seed)
    labeled = inject_clutter(m, spec)
    save_map(labeled.bits, args.output)
    if args.truth_out:
        pixels = np.full(labeled.truth.shape, 255, dtype=np.uint8)
        pixels[labeled.truth == 1] = 0
        pixels[labeled.truth == 2] = 128
        Image.fromarray(pixels, mode="L").save(args.truth_out, format="PNG")
    report = _base_report(args.map, m, cfg)
    report["clutter"] = {
        "shape": spec.shape,
        "count": spec.count,
        "size": spec.size,
        "seed": spec.seed,
        "structure_cells": labeled.structure_count,
        "clutter_cells": labeled.clutter_count,
    }
    if args.json:
        _emit_json(report, args.json)
    return EXIT_OK


def cmd_sweep(args) -> int:
    doc = _load_config_file(args.config)
    if "maps" not in doc or not isinstance(doc["maps"], dict) or not doc["maps"]:
        raise MapFormatError(f"{args.config}: config needs a non-empty 'maps' mapping")
    cfg = PipelineConfig(**{k: doc[k] for k in _CONFIG_KEYS if k in doc})
    maps = {}
    for map_id, path in doc["maps"].items():
        maps[map_id] = _load_binary(str(path), None, cfg)
    out_dir = args.output_dir or "."
    os.makedirs(out_dir, exist_ok=True)
    out_csv = os.path.join(out_dir, doc.get("out_csv", "rows.csv"))
    out_json = os.path.join(out_dir, doc.get("out_json", "rows.json"))
    rows = run_sweep(
        maps,
        shapes=tuple(doc.get("shapes", SHAPES)),
        sizes=tuple(doc.get("sizes", (5, 15, 30))),
        counts=tuple(doc.get("counts", (20, 80, 160))),
        seeds=tuple(doc.get("seeds", (0,))),
        cfg=cfg,
        out_csv=out_csv,
        out_json=out_json,
        resume=args.resume,
    )
    sys.stdout.write(f"{len(rows)} rows -> {out_csv}\n")
    return EXIT_OK


def cmd_correlate(args) -> int:
    rows = read_rows_csv(args.rows)
    try:
        result = correlation(rows)
    except (ValueError, GridspectError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT_ERROR
    report = {
        "r": _rounded(result.r, 6),
        "n": result.n,
        "by_count": {str(k): _rounded(v, 6) for k, v in result.by_count.items()},
    }
    _emit_json(report, args.json)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridspect",
        description="Structure detection, scoring and clutter removal for occupancy-grid maps",
    )
    parser.add_argument("--version", action="version", version=f"gridspect {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="detect dominant directions and score the map")
    p.add_argument("map")
    _add_pipeline_flags(p)
    p.add_argument("--json", default="-", help="report path, '-' for stdout")
    p.add_argument("--spectrum-out", help="write the amplitude spectrum as PNG")
    p.add_argument("--polar-out", help="write the unfolded spectrum as PNG")
    p.add_argument("--profile-out", help="write the directional profile as PNG")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("declutter", help="remove clutter via structure scoring")
    p.add_argument("map")
    _add_pipeline_flags(p)
    p.add_argument("-o", "--output", help="decluttered map path (.pgm/.png)")
    p.add_argument("--threshold", type=float, help="override the mixture threshold")
    p.add_argument("--score-out", help="write the per-cell score image")
    p.add_argument("--json", default="-", help="report path, '-' for stdout")
    p.set_defaults(func=cmd_declutter)

    p = sub.add_parser("walls", help="extract wall lines (optionally score against ground truth)")
    p.add_argument("map")
    _add_pipeline_flags(p)
    p.add_argument("--gt", help="ground-truth wall lines (JSON)")
    p.add_argument("--no-filter", action="store_true", help="run on the raw map, no alignment")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--votes", type=int, default=20)
    p.add_argument("--min-length", type=float, default=10.0)
    p.add_argument("--max-gap", type=int, default=3)
    p.add_argument("--angle-tol", type=float, default=5.0)
    p.add_argument("--offset-tol", type=float, default=5.0)
    p.add_argument("--snap-tol", type=float, default=5.0)
    p.add_argument("--json", default="-", help="report path, '-' for stdout")
    p.set_defaults(func=cmd_walls)

    p = sub.add_parser("inject", help="add labeled synthetic clutter to a map")
    p.add_argument("map")
    _add_pipeline_flags(p)
    p.add_argument("--shape", choices=SHAPES, default="square")
    p.add_argument("--size", type=int, default=5)
    p.add_argument("--count", type=int, default=40)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True, help="cluttered map path")
    p.add_argument("--truth-out", help="write the label image (PNG)")
    p.add_argument("--json", help="report path, '-' for stdout")
    p.set_defaults(func=cmd_inject)

    p = sub.add_parser("sweep", help="run the clutter sweep defined by a config file")
    p.add_argument("config")
    p.add_argument("-o", "--output-dir", help="directory for rows.csv/rows.json")
    p.add_argument("--resume", action="store_true", help="skip rows already in the CSV")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("correlate", help="score-vs-precision correlation of sweep rows")
    p.add_argument("rows", help="rows.csv from a sweep")
    p.add_argument("--json", default="-", help="report path, '-' for stdout")
    p.set_defaults(func=cmd_correlate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GridspectError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT_ERROR
    except FileNotFoundError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
