"""Per-cell structure scoring and clutter removal.

The spectrum cells along the dominant directions are kept (structure
mask), inverted back to a real field (the nominal reference map), and the
score distribution at occupied cells is split by a two-component Gaussian
mixture. Cells scoring above the component-intersection threshold are
kept as structure; everything else is removed as clutter.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import NoSeparationError, NoStructureError, TooFewSamplesError
from .grid_map import BinaryMap
from .spectral import (
    DEFAULT_HALF_WIDTH_DEG,
    Spectrum,
    StructureMask,
    apply_mask,
    fold,
    idft2,
)
from .structure import DominantDirections

VARIANCE_FLOOR = 1e-12
MEAN_SEPARATION_EPS = 1e-6

FLAG_VARIANCE_COLLAPSE = "VARIANCE_COLLAPSE"
FLAG_MIDPOINT_FALLBACK = "MIDPOINT_FALLBACK"
FLAG_CONSTANT_SCORES = "CONSTANT_SCORES"


@dataclass(frozen=True)
class NominalMap:
    """Reconstruction from the masked spectrum; a stand-in reference map."""

    side: int
    scores: np.ndarray
    normalized_scores: np.ndarray | None = None  # min-max over occupied cells
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class DeclutteredMap:
    side: int
    bits: np.ndarray

    def as_binary_map(self) -> BinaryMap:
        return BinaryMap(width=self.side, height=self.side, bits=self.bits)


@dataclass(frozen=True)
class GmmFit:
    """Two-component 1D Gaussian mixture; component 0 has the larger mean."""

    means: tuple[float, float]  # (structure, clutter)
    variances: tuple[float, float]
    weights: tuple[float, float]
    iterations: int
    converged: bool
    log_likelihoods: tuple[float, ...]
    flags: tuple[str, ...] = ()
    threshold_s: float | None = None

    @property
    def tau(self) -> float:
        """Weight of the structure component."""
        return self.weights[0]


@dataclass(frozen=True)
class GmmThreshold:
    s: float
    fallback_midpoint: bool = False


def structure_mask(
    dirs: DominantDirections,
    side: int,
    half_width_deg: float = DEFAULT_HALF_WIDTH_DEG,
) -> StructureMask:
    """Spectrum mask along the detected directions; errors without peaks."""
    if dirs.n_peaks == 0:
        raise NoStructureError("no dominant directions to build a mask from")
    return fold(dirs.spectral_angles_deg, side, half_width_deg)


def reconstruct_nominal(
    spectrum: Spectrum,
    mask: StructureMask,
    occupied: np.ndarray | BinaryMap | None = None,
) -> NominalMap:
    """Invert the masked spectrum into a per-cell structure score field.

    When ``occupied`` is given, scores are additionally min-max normalized
    over the occupied cells and clipped to [0, 1] elsewhere.
    """
    scores = idft2(apply_mask(spectrum, mask))
    normalized = None
    flags: tuple[str, ...] = ()
    if occupied is not None:
        occ = occupied.bits if isinstance(occupied, BinaryMap) else np.asarray(occupied)
        if occ.shape != scores.shape:
            raise ValueError("occupied mask shape does not match the spectrum side")
        vals = scores[occ]
        if vals.size == 0:
            raise ValueError("occupied mask selects no cells")
        lo = float(vals.min())
        hi = float(vals.max())
        if hi == lo:
            normalized = np.zeros_like(scores)
            flags = (FLAG_CONSTANT_SCORES,)
        else:
            normalized = np.clip((scores - lo) / (hi - lo), 0.0, 1.0)
    return NominalMap(
        side=spectrum.side, scores=scores, normalized_scores=normalized, flags=flags
    )


def _log_gauss(x: np.ndarray, mean: float, var: float) -> np.ndarray:
    return -0.5 * (np.log(2.0 * np.pi * var) + (x - mean) ** 2 / var)


def fit_gmm(scores, max_iter: int = 200, tol: float = 1e-6) -> GmmFit:
    """Fit a two-component 1D Gaussian mixture by EM.

    Means start at the 25th/75th percentiles, both variances at the sample
    variance, weights at 0.5/0.5. Iterates until the log-likelihood gain
    drops below ``tol`` or ``max_iter`` is reached. The component with the
    larger mean is labeled structure and stored first.
    """
    x = np.asarray(scores, dtype=np.float64).ravel()
    if x.size < 20:
        raise TooFewSamplesError(f"need at least 20 samples, got {x.size}")

    flags: set[str] = set()
    means = np.percentile(x, [75.0, 25.0]).astype(np.float64)
    var0 = float(x.var())
    if var0 < VARIANCE_FLOOR:
        var0 = VARIANCE_FLOOR
        flags.add(FLAG_VARIANCE_COLLAPSE)
    variances = np.array([var0, var0])
    weights = np.array([0.5, 0.5])

    ll_trace: list[float] = []
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        # E step
        log_p = np.stack(
            [
                np.log(weights[k]) + _log_gauss(x, means[k], variances[k])
                for k in range(2)
            ]
        )
        log_norm = np.logaddexp(log_p[0], log_p[1])
        ll = float(log_norm.sum())
        resp = np.exp(log_p - log_norm)

        if ll_trace and ll < ll_trace[-1] - 1e-9 * max(1.0, abs(ll_trace[-1])):
            raise AssertionError("EM log-likelihood decreased")
        ll_trace.append(ll)
        if len(ll_trace) > 1 and ll - ll_trace[-2] < tol:
            converged = True
            break

        # M step
        totals = resp.sum(axis=1)
        totals = np.maximum(totals, 1e-300)
        means = (resp @ x) / totals
        for k in range(2):
            var = float((resp[k] @ (x - means[k]) ** 2) / totals[k])
            if var < VARIANCE_FLOOR:
                var = VARIANCE_FLOOR
                flags.add(FLAG_VARIANCE_COLLAPSE)
            variances[k] = var
        weights = totals / x.size

    order = np.argsort(-means)  # structure = larger mean, stored first
    return GmmFit(
        means=(float(means[order[0]]), float(means[order[1]])),
        variances=(float(variances[order[0]]), float(variances[order[1]])),
        weights=(float(weights[order[0]]), float(weights[order[1]])),
        iterations=iterations,
        converged=converged,
        log_likelihoods=tuple(ll_trace),
        flags=tuple(sorted(flags)),
    )


def gmm_threshold(fit: GmmFit) -> GmmThreshold:
    """Score where the two weighted component densities intersect.

    Solves tau * N_structure(s) = (1 - tau) * N_clutter(s); of the (up to
    two) roots the one between the component means is returned. If neither
    root lies there, the midpoint of the means is used and flagged.
    """
    mu_s, mu_c = fit.means
    var_s, var_c = fit.variances
    tau = fit.tau
    if abs(mu_s - mu_c) < MEAN_SEPARATION_EPS:
        raise NoSeparationError("component means coincide; no threshold exists")
    if tau <= 0.0 or tau >= 1.0:
        raise NoSeparationError("degenerate component weight")

    lo, hi = min(mu_s, mu_c), max(mu_s, mu_c)
    # log-equality of the weighted densities is quadratic in s
    a = 0.5 / var_c - 0.5 / var_s
    b = mu_s / var_s - mu_c / var_c
    c = (
        mu_c * mu_c / (2.0 * var_c)
        - mu_s * mu_s / (2.0 * var_s)
        + np.log(tau / np.sqrt(var_s))
        - np.log((1.0 - tau) / np.sqrt(var_c))
    )
    if abs(a) < 1e-300:
        roots = [] if b == 0.0 else [-c / b]
    else:
        disc = b * b - 4.0 * a * c
        if disc < 0.0:
            roots = []
        else:
            sq = float(np.sqrt(disc))
            roots = [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)]

    inside = [r for r in roots if lo <= r <= hi]
    if inside:
        mid = 0.5 * (lo + hi)
        s = min(inside, key=lambda r: abs(r - mid))
        return GmmThreshold(s=float(s), fallback_midpoint=False)
    return GmmThreshold(s=0.5 * (lo + hi), fallback_midpoint=True)


def attach_threshold(fit: GmmFit, threshold: GmmThreshold) -> GmmFit:
    """Return a copy of the fit carrying the derived threshold."""
    flags = fit.flags
    if threshold.fallback_midpoint and FLAG_MIDPOINT_FALLBACK not in flags:
        flags = flags + (FLAG_MIDPOINT_FALLBACK,)
    return replace(fit, threshold_s=threshold.s, flags=flags)


def declutter(m: BinaryMap, nominal: NominalMap, s: float) -> DeclutteredMap:
    """Keep the occupied cells whose normalized score exceeds ``s``."""
    if m.width != m.height or m.width != nominal.side:
        raise ValueError("map and nominal dimensions differ")
    if nominal.normalized_scores is None:
        raise ValueError("nominal map carries no normalized scores")
    bits = m.bits & (nominal.normalized_scores > s)
    return DeclutteredMap(side=nominal.side, bits=bits)
