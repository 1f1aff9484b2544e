"""Dominant-direction detection on the circular directional profile.

Peaks are ranked by prominence: the height of a peak over the lowest
contour that encircles it without enclosing a higher peak. Wall
directions are circular, so the default prominence search wraps around;
a linear variant (plain 1D treatment of the profile) is available as a
config switch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.signal

from .errors import ConstantProfileError, NotALocalMaximumError
from .global_score import scale_profile
from .spectral import DirectionalProfile

DEFAULT_PROMINENCE_THRESHOLD = 0.5
PAIR_TOLERANCE_BINS = 1


@dataclass(frozen=True)
class DirectionPeak:
    """One dominant direction, collapsed from a symmetric pair of peaks."""

    spectral_angle_deg: float  # in [0, 180)
    prominence: float  # scaled units
    profile_value: float  # scaled units
    bin: int  # profile bin of the kept peak
    partner_bin: int | None  # symmetric partner bin; None if unpaired

    @property
    def wall_angle_deg(self) -> float:
        """Spatial wall angle: lines concentrate energy along their normal."""
        return (self.spectral_angle_deg + 90.0) % 180.0

    @property
    def unpaired(self) -> bool:
        return self.partner_bin is None


@dataclass(frozen=True)
class DominantDirections:
    peaks: tuple[DirectionPeak, ...]
    angle_bins: int

    @property
    def n_peaks(self) -> int:
        return len(self.peaks)

    @property
    def spectral_angles_deg(self) -> tuple[float, ...]:
        return tuple(p.spectral_angle_deg for p in self.peaks)

    @property
    def wall_angles_deg(self) -> tuple[float, ...]:
        return tuple(p.wall_angle_deg for p in self.peaks)

    @property
    def peak_bins(self) -> tuple[int, ...]:
        """All pre-collapse peak bins (both symmetric partners)."""
        bins = []
        for p in self.peaks:
            bins.append(p.bin)
            if p.partner_bin is not None:
                bins.append(p.partner_bin)
        return tuple(sorted(bins))

    @property
    def has_unpaired(self) -> bool:
        return any(p.unpaired for p in self.peaks)


def circular_local_maxima(values: np.ndarray) -> list[int]:
    """Indices of local maxima on a circular signal.

    Plateaus count once, represented by their middle sample. A constant
    signal has no maxima.
    """
    v = np.asarray(values, dtype=np.float64)
    n = len(v)
    if n < 2:
        return []
    start = next((k for k in range(n) if v[k] != v[k - 1]), None)
    if start is None:
        return []
    maxima = []
    k = start
    visited = 0
    while visited < n:
        j = k
        run = 1
        while run < n and v[(j + 1) % n] == v[k]:
            j = (j + 1) % n
            run += 1
        if v[k] > v[(k - 1) % n] and v[k] > v[(j + 1) % n]:
            maxima.append((k + (run - 1) // 2) % n)
        visited += run
        k = (j + 1) % n
    return sorted(maxima)


def peak_prominence(values, index: int, mode: str = "circular") -> float:
    """Prominence of the local maximum at ``index``.

    Circular mode extends the search left/right with wrap-around until a
    strictly higher value is met or the full circle has been traversed;
    the prominence is the peak height minus the higher of the two interval
    minima. Linear mode delegates to scipy's convention.
    """
    v = np.asarray(getattr(values, "values", values), dtype=np.float64)
    n = len(v)
    if index < 0 or index >= n:
        raise IndexError(f"index {index} out of range for {n} bins")
    if mode == "linear":
        if not (
            (index == 0 or v[index] >= v[index - 1])
            and (index == n - 1 or v[index] >= v[index + 1])
            and (v[index] > v.min())
        ):
            raise NotALocalMaximumError(f"bin {index} is not a local maximum")
        return float(scipy.signal.peak_prominences(v, [index])[0][0])

    peak = v[index]
    prev_v = v[(index - 1) % n]
    next_v = v[(index + 1) % n]
    if prev_v > peak or next_v > peak:
        raise NotALocalMaximumError(f"bin {index} is not a local maximum")

    left_right = []
    for step in (-1, 1):
        lowest = peak
        j = index
        for _ in range(n - 1):
            j = (j + step) % n
            if v[j] > peak:
                break
            if v[j] < lowest:
                lowest = v[j]
        left_right.append(lowest)
    if left_right[0] == peak and left_right[1] == peak:
        raise NotALocalMaximumError(f"bin {index} is not a local maximum")
    return float(peak - max(left_right))


def _pair_bins(kept: list[int], prominences: dict[int, float], n: int):
    """Collapse symmetric peak pairs (phi, phi+180deg) within tolerance."""
    half = n // 2
    used: set[int] = set()
    pairs: list[tuple[int, int | None]] = []
    for b in kept:
        if b in used:
            continue
        target = (b + half) % n
        partner = None
        for cand in kept:
            if cand == b or cand in used:
                continue
            d = abs(cand - target) % n
            if min(d, n - d) <= PAIR_TOLERANCE_BINS:
                partner = cand
                break
        used.add(b)
        if partner is not None:
            used.add(partner)
            rep, other = (
                (b, partner) if prominences[b] >= prominences[partner] else (partner, b)
            )
            pairs.append((rep, other))
        else:
            pairs.append((b, None))
    return pairs


def find_dominant_directions(
    profile: DirectionalProfile,
    t: float = DEFAULT_PROMINENCE_THRESHOLD,
    prominence_mode: str = "circular",
) -> DominantDirections:
    """Detect dominant directions: scaled peaks with prominence >= ``t``.

    The profile is min-max scaled first, making the threshold independent
    of map size and occupied-cell count. Symmetric pairs are collapsed to
    one direction in [0, 180), keeping the larger prominence; unpaired
    peaks are kept but flagged. An empty result is valid and means the map
    has no usable structure.
    """
    if not (0.0 < t <= 1.0):
        raise ValueError("prominence threshold must lie in (0, 1]")
    n = profile.angle_bins
    try:
        scaled = scale_profile(profile)
    except ConstantProfileError:
        return DominantDirections(peaks=(), angle_bins=n)

    kept = []
    prominences = {}
    for idx in circular_local_maxima(scaled):
        prom = peak_prominence(scaled, idx, mode=prominence_mode)
        if prom >= t:
            kept.append(idx)
            prominences[idx] = prom

    bin_width = profile.bin_width_deg
    peaks = []
    for rep, partner in _pair_bins(sorted(kept), prominences, n):
        peaks.append(
            DirectionPeak(
                spectral_angle_deg=(rep * bin_width) % 180.0,
                prominence=prominences[rep],
                profile_value=float(scaled[rep]),
                bin=rep,
                partner_bin=partner,
            )
        )
    peaks.sort(key=lambda p: p.spectral_angle_deg)
    return DominantDirections(peaks=tuple(peaks), angle_bins=n)
