"""End-to-end orchestration shared by the CLI and the evaluation harness.

analyze_map: binary map -> spectrum -> directional profile -> dominant
directions -> global score. declutter_map continues through the structure
mask, nominal reconstruction, mixture threshold and clutter removal, and
crops the result back to the input frame.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConstantProfileError, NoSeparationError
from .global_score import GlobalScore, scale_profile, structure_score
from .grid_map import BinaryMap, pad_to_square
from .local_score import (
    GmmFit,
    NominalMap,
    attach_threshold,
    declutter,
    fit_gmm,
    gmm_threshold,
    reconstruct_nominal,
    structure_mask,
)
from .spectral import (
    DEFAULT_ANGLE_BINS,
    DEFAULT_HALF_WIDTH_DEG,
    DirectionalProfile,
    PolarAmplitude,
    Spectrum,
    dft2,
    directional_profile,
    unfold,
)
from .structure import (
    DEFAULT_PROMINENCE_THRESHOLD,
    DominantDirections,
    find_dominant_directions,
)

FLAG_NO_SEPARATION = "NO_SEPARATION"


@dataclass(frozen=True)
class PipelineConfig:
    occupied_thresh: float = 0.65
    free_thresh: float = 0.196
    angle_bins: int = DEFAULT_ANGLE_BINS
    radius_bins: int | None = None
    prominence_threshold: float = DEFAULT_PROMINENCE_THRESHOLD
    prominence_mode: str = "circular"
    half_width_deg: float = DEFAULT_HALF_WIDTH_DEG
    gmm_max_iter: int = 200
    gmm_tol: float = 1e-6

    def echo(self) -> dict:
        return {
            "occupied_thresh": self.occupied_thresh,
            "free_thresh": self.free_thresh,
            "angle_bins": self.angle_bins,
            "radius_bins": self.radius_bins,
            "prominence_threshold": self.prominence_threshold,
            "prominence_mode": self.prominence_mode,
            "half_width_deg": self.half_width_deg,
            "gmm_max_iter": self.gmm_max_iter,
            "gmm_tol": self.gmm_tol,
        }


@dataclass(frozen=True)
class Analysis:
    source: BinaryMap
    padded: BinaryMap
    offset: tuple[int, int]  # (x, y) of source's top-left in the padded frame
    spectrum: Spectrum
    polar: PolarAmplitude
    profile: DirectionalProfile
    dirs: DominantDirections
    score: GlobalScore


@dataclass(frozen=True)
class DeclutterOutcome:
    analysis: Analysis
    nominal: NominalMap | None
    fit: GmmFit | None
    threshold: float | None
    decluttered: BinaryMap | None  # in the source frame
    kept: int
    removed: int
    flags: tuple[str, ...] = ()


def analyze_map(m: BinaryMap, cfg: PipelineConfig = PipelineConfig()) -> Analysis:
    padded, offset = pad_to_square(m)
    spectrum = dft2(padded)
    polar = unfold(spectrum, cfg.angle_bins, cfg.radius_bins)
    profile = directional_profile(polar)
    dirs = find_dominant_directions(
        profile, cfg.prominence_threshold, prominence_mode=cfg.prominence_mode
    )
    try:
        scaled = scale_profile(profile)
    except ConstantProfileError:
        scaled = None
    score = structure_score(scaled, dirs)
    return Analysis(
        source=m,
        padded=padded,
        offset=offset,
        spectrum=spectrum,
        polar=polar,
        profile=profile,
        dirs=dirs,
        score=score,
    )


def _crop(bits: np.ndarray, offset: tuple[int, int], m: BinaryMap) -> BinaryMap:
    ox, oy = offset
    return BinaryMap(
        width=m.width,
        height=m.height,
        bits=np.ascontiguousarray(bits[oy : oy + m.height, ox : ox + m.width]),
    )


def declutter_map(
    m: BinaryMap,
    cfg: PipelineConfig = PipelineConfig(),
    threshold_override: float | None = None,
) -> DeclutterOutcome:
    """Run the full clutter-removal pipeline on a binary map.

    With no detected structure the outcome carries the NO_STRUCTURE score
    flag and no decluttered map. When the mixture components do not
    separate, the input passes through unchanged and NO_SEPARATION is
    flagged.
    """
    analysis = analyze_map(m, cfg)
    occupied = m.occupied_count
    if analysis.dirs.n_peaks == 0:
        return DeclutterOutcome(
            analysis=analysis,
            nominal=None,
            fit=None,
            threshold=None,
            decluttered=None,
            kept=0,
            removed=occupied,
            flags=analysis.score.flags,
        )

    mask = structure_mask(analysis.dirs, analysis.padded.width, cfg.half_width_deg)
    nominal = reconstruct_nominal(analysis.spectrum, mask, occupied=analysis.padded)
    flags: tuple[str, ...] = nominal.flags
    fit = None
    if threshold_override is not None:
        threshold = float(threshold_override)
    else:
        samples = nominal.normalized_scores[analysis.padded.bits]
        fit = fit_gmm(samples, max_iter=cfg.gmm_max_iter, tol=cfg.gmm_tol)
        try:
            thr = gmm_threshold(fit)
        except NoSeparationError:
            flags = flags + (FLAG_NO_SEPARATION,)
            cropped = _crop(analysis.padded.bits, analysis.offset, m)
            return DeclutterOutcome(
                analysis=analysis,
                nominal=nominal,
                fit=fit,
                threshold=None,
                decluttered=cropped,
                kept=occupied,
                removed=0,
                flags=flags,
            )
        fit = attach_threshold(fit, thr)
        threshold = thr.s

    dec = declutter(analysis.padded, nominal, threshold)
    cropped = _crop(dec.bits, analysis.offset, m)
    kept = cropped.occupied_count
    return DeclutterOutcome(
        analysis=analysis,
        nominal=nominal,
        fit=fit,
        threshold=threshold,
        decluttered=cropped,
        kept=kept,
        removed=occupied - kept,
        flags=flags,
    )
