"""Frequency-domain core: centered 2D DFT, polar unfolding and folding.

The spectrum of a real map is conjugate point-symmetric about its center,
so every direction shows up as a symmetric pair of rays. Unfolding
resamples the amplitude onto an (angle, radius) grid; folding maps a set
of directions back to the spectrum cells they pass through.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image

from . import kernels
from .errors import AsymmetricMaskError, NonSquareMapError
from .grid_map import BinaryMap

DEFAULT_ANGLE_BINS = 720
DEFAULT_HALF_WIDTH_DEG = 0.5

_PARSEVAL_RTOL = 1e-9
_IMAG_RTOL = 1e-9


@dataclass(frozen=True)
class Spectrum:
    """Complex 2D spectrum with the DC coefficient at (side//2, side//2)."""

    side: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.coeffs.shape != (self.side, self.side):
            raise ValueError("coeffs shape does not match side")

    @property
    def center(self) -> int:
        return self.side // 2

    @property
    def amplitude(self) -> np.ndarray:
        return np.abs(self.coeffs)


@dataclass(frozen=True)
class PolarAmplitude:
    """Spectrum amplitude resampled on an (angle, radius) grid."""

    angle_bins: int
    radii: np.ndarray
    values: np.ndarray  # (angle_bins, len(radii))

    @property
    def bin_width_deg(self) -> float:
        return 360.0 / self.angle_bins


@dataclass(frozen=True)
class DirectionalProfile:
    """Per-angle cumulative amplitude over all radii; circular over 360 deg."""

    values: np.ndarray

    @property
    def angle_bins(self) -> int:
        return len(self.values)

    @property
    def bin_width_deg(self) -> float:
        return 360.0 / self.angle_bins

    def angle_deg(self, index: int) -> float:
        return (index % self.angle_bins) * self.bin_width_deg


@dataclass(frozen=True)
class StructureMask:
    """Boolean spectrum mask selecting cells along chosen directions."""

    side: int
    bits: np.ndarray

    def __post_init__(self):
        if self.bits.shape != (self.side, self.side):
            raise ValueError("mask shape does not match side")


def dft2(m: BinaryMap) -> Spectrum:
    """Forward 2D DFT of a square binary map, DC shifted to the center."""
    if m.width != m.height:
        raise NonSquareMapError(f"map is {m.width}x{m.height}; pad_to_square first")
    field = m.bits.astype(np.float64)
    coeffs = np.fft.fftshift(np.fft.fft2(field))
    # Parseval guard against a broken transform path
    spatial = float(np.sum(field * field))
    spectral = float(np.sum(np.abs(coeffs) ** 2)) / (m.width * m.height)
    if spatial > 0.0 and abs(spatial - spectral) > _PARSEVAL_RTOL * spatial:
        raise AssertionError("Parseval identity violated in dft2")
    return Spectrum(side=m.width, coeffs=coeffs)


def idft2(spectrum: Spectrum, rel_tol: float = _IMAG_RTOL) -> np.ndarray:
    """Inverse transform back to a real field.

    Raises AsymmetricMaskError if the imaginary residual exceeds ``rel_tol``
    of the maximum amplitude, which indicates a non-point-symmetric mask.
    """
    out = np.fft.ifft2(np.fft.ifftshift(spectrum.coeffs))
    max_amp = float(np.abs(out).max()) if out.size else 0.0
    if max_amp > 0.0 and float(np.abs(out.imag).max()) > rel_tol * max_amp:
        raise AsymmetricMaskError("inverse transform is not real; mask is asymmetric")
    return np.ascontiguousarray(out.real)


def max_radius(side: int) -> int:
    """Largest usable radius: inside the inscribed circle, off the border."""
    return side // 2 - 1


def unfold(
    spectrum: Spectrum,
    angle_bins: int = DEFAULT_ANGLE_BINS,
    radius_bins: int | None = None,
) -> PolarAmplitude:
    """Resample the spectrum amplitude onto a polar grid.

    Angles cover [0, 360) in ``angle_bins`` steps; radii run 1..rho_max in
    1-cell steps (rho_max = side//2 - 1, the inscribed circle). Values are
    bilinear interpolations of the amplitude, exact at integer nodes.
    """
    if angle_bins < 4:
        raise ValueError("angle_bins must be at least 4")
    rho_max = max_radius(spectrum.side)
    n_r = rho_max if radius_bins is None else min(int(radius_bins), rho_max)
    if n_r < 1:
        raise ValueError(f"map side {spectrum.side} too small to unfold")
    radii = np.arange(1, n_r + 1, dtype=np.float64)
    phis = np.arange(angle_bins, dtype=np.float64) * (2.0 * np.pi / angle_bins)
    c = float(spectrum.center)
    amp = np.ascontiguousarray(spectrum.amplitude)
    values = kernels.unfold_amplitude(amp, c, c, np.cos(phis), np.sin(phis), radii)
    return PolarAmplitude(angle_bins=angle_bins, radii=radii, values=values)


def directional_profile(polar: PolarAmplitude) -> DirectionalProfile:
    """Sum the polar amplitude over radius for each angle."""
    return DirectionalProfile(values=polar.values.sum(axis=1))


def _angdiff180(a: np.ndarray, b: float) -> np.ndarray:
    d = np.abs(a - b) % 180.0
    return np.minimum(d, 180.0 - d)


def fold(
    angles_deg,
    side: int,
    half_width_deg: float = DEFAULT_HALF_WIDTH_DEG,
) -> StructureMask:
    """Select the spectrum cells lying along the given directions.

    A cell is included if its angle from the center (mod 180) is within
    ``half_width_deg`` of any listed angle and its radius lies in
    (0, rho_max]. The DC cell is always included; the result is point
    symmetric by construction.
    """
    if half_width_deg <= 0.0:
        raise ValueError("half_width_deg must be positive")
    c = side // 2
    rho_max = max_radius(side)
    yy, xx = np.mgrid[0:side, 0:side]
    dy = yy - c
    dx = xx - c
    rho = np.hypot(dx, dy)
    ang = np.degrees(np.arctan2(dy, dx)) % 180.0
    sel = np.zeros((side, side), dtype=bool)
    for a in np.atleast_1d(np.asarray(angles_deg, dtype=np.float64)):
        sel |= _angdiff180(ang, float(a) % 180.0) <= half_width_deg
    sel &= (rho > 0) & (rho <= rho_max)
    sel |= sel[::-1, ::-1] if side % 2 == 1 else _point_reflect(sel, c)
    sel[c, c] = True
    return StructureMask(side=side, bits=sel)


def _point_reflect(sel: np.ndarray, c: int) -> np.ndarray:
    """Reflect mask cells through (c, c); cells without a partner drop out."""
    out = np.zeros_like(sel)
    ys, xs = np.nonzero(sel)
    ry = 2 * c - ys
    rx = 2 * c - xs
    ok = (ry >= 0) & (ry < sel.shape[0]) & (rx >= 0) & (rx < sel.shape[1])
    out[ry[ok], rx[ok]] = sel[ys[ok], xs[ok]]
    return out


def apply_mask(spectrum: Spectrum, mask: StructureMask) -> Spectrum:
    """Zero all coefficients outside the mask."""
    if mask.side != spectrum.side:
        raise ValueError("mask and spectrum sides differ")
    return Spectrum(side=spectrum.side, coeffs=np.where(mask.bits, spectrum.coeffs, 0.0))


def _to_png(arr: np.ndarray, path: str) -> None:
    lo, hi = float(arr.min()), float(arr.max())
    pixels = (
        np.zeros(arr.shape, dtype=np.uint8)
        if hi == lo
        else np.round(255.0 * (arr - lo) / (hi - lo)).astype(np.uint8)
    )
    Image.fromarray(pixels, mode="L").save(path, format="PNG")


def save_amplitude_png(spectrum: Spectrum, path: str) -> None:
    """Debug dump: log-compressed amplitude spectrum as grayscale PNG."""
    _to_png(np.log1p(spectrum.amplitude), path)


def save_polar_png(polar: PolarAmplitude, path: str) -> None:
    """Debug dump: log-compressed unfolded spectrum (angle x radius) as PNG."""
    _to_png(np.log1p(polar.values), path)
