"""Global structure scoring.

The directional profile is min-max scaled, and the overall level of
structure is the ratio between the scaled profile's mean and the mean of
its values at the peak bins. Structured maps score near 0, unstructured
maps near 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConstantProfileError

TRUST_TRUSTED = "TRUSTED"
TRUST_UNCERTAIN = "UNCERTAIN"
TRUST_FAILED = "FAILED"

NO_STRUCTURE_FLAG = "NO_STRUCTURE"


def classify_trust(w: float) -> str:
    """Rule-of-thumb confidence bands for downstream decluttering."""
    if w < 0.2:
        return TRUST_TRUSTED
    if w <= 0.4:
        return TRUST_UNCERTAIN
    return TRUST_FAILED


@dataclass(frozen=True)
class GlobalScore:
    w: float
    mean_scaled_profile: float
    mean_scaled_peak: float
    n_peaks: int
    flags: tuple[str, ...] = ()

    @property
    def trust(self) -> str:
        return classify_trust(self.w)

    @property
    def no_structure(self) -> bool:
        return NO_STRUCTURE_FLAG in self.flags


def scale_profile(profile) -> np.ndarray:
    """Min-max scale the profile to [0, 1].

    Invariant under positive affine transforms of the input; raises
    ConstantProfileError when max equals min (no directional signal).
    """
    values = np.asarray(getattr(profile, "values", profile), dtype=np.float64)
    if values.size == 0:
        raise ValueError("profile is empty")
    lo = float(values.min())
    hi = float(values.max())
    if hi == lo:
        raise ConstantProfileError("directional profile is constant")
    return (values - lo) / (hi - lo)


def structure_score(scaled_profile, dirs) -> GlobalScore:
    """Ratio of mean scaled amplitude to mean scaled peak amplitude.

    Peak bins include both symmetric partners of every direction. With no
    detected directions the score degenerates to 1.0 and is flagged so the
    caller can refuse further processing instead of crashing.
    """
    n_peaks = len(dirs.peaks)
    if n_peaks == 0:
        mean_profile = (
            float(np.mean(scaled_profile)) if scaled_profile is not None else 0.0
        )
        return GlobalScore(
            w=1.0,
            mean_scaled_profile=mean_profile,
            mean_scaled_peak=0.0,
            n_peaks=0,
            flags=(NO_STRUCTURE_FLAG,),
        )
    scaled = np.asarray(scaled_profile, dtype=np.float64)
    peak_bins = np.asarray(dirs.peak_bins, dtype=np.intp)
    mean_profile = float(scaled.mean())
    mean_peak = float(scaled[peak_bins].mean())
    return GlobalScore(
        w=mean_profile / mean_peak,
        mean_scaled_profile=mean_profile,
        mean_scaled_peak=mean_peak,
        n_peaks=n_peaks,
    )
