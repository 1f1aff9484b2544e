"""Independent reference implementations used to freeze expected values.

Everything here is deliberately written against the definitions, not the
production code paths: direct-summation transforms, roll-based circular
prominence, scalar shape rasterizers and plain-loop confusion counts.
"""

import numpy as np


def naive_dft2_centered(bits) -> np.ndarray:
    """Direct-summation 2D DFT with the DC coefficient at (N//2, N//2)."""
    x = np.asarray(bits, dtype=np.float64)
    n = x.shape[0]
    assert x.shape == (n, n)
    c = n // 2
    mm, nn = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    out = np.empty((n, n), dtype=np.complex128)
    for p in range(n):
        for q in range(n):
            phase = -2j * np.pi * ((p - c) * mm + (q - c) * nn) / n
            out[p, q] = np.sum(x * np.exp(phase))
    return out


def naive_idft2_centered(coeffs) -> np.ndarray:
    """Direct-summation inverse of naive_dft2_centered (complex output)."""
    s = np.asarray(coeffs, dtype=np.complex128)
    n = s.shape[0]
    c = n // 2
    pp, qq = np.meshgrid(np.arange(n) - c, np.arange(n) - c, indexing="ij")
    out = np.empty((n, n), dtype=np.complex128)
    for m in range(n):
        for k in range(n):
            phase = 2j * np.pi * (pp * m + qq * k) / n
            out[m, k] = np.sum(s * np.exp(phase)) / (n * n)
    return out


def naive_polar_profile(coeffs, angle_bins: int) -> np.ndarray:
    """Cumulative amplitude per angle via explicit per-sample interpolation."""
    amp = np.abs(np.asarray(coeffs))
    n = amp.shape[0]
    c = n // 2
    rho_max = n // 2 - 1
    profile = np.zeros(angle_bins)
    for a in range(angle_bins):
        phi = 2.0 * np.pi * a / angle_bins
        for rho in range(1, rho_max + 1):
            x = c + rho * np.cos(phi)
            y = c + rho * np.sin(phi)
            x0, y0 = int(np.floor(x)), int(np.floor(y))
            fx, fy = x - x0, y - y0
            x1, y1 = min(x0 + 1, n - 1), min(y0 + 1, n - 1)
            profile[a] += (
                (1 - fx) * (1 - fy) * amp[y0, x0]
                + fx * (1 - fy) * amp[y0, x1]
                + (1 - fx) * fy * amp[y1, x0]
                + fx * fy * amp[y1, x1]
            )
    return profile


def brute_circular_prominence(values, index: int) -> float:
    """Roll-based exhaustive prominence on a circular profile."""
    v = np.asarray(values, dtype=np.float64)
    n = len(v)
    r = np.roll(v, -index)  # peak at position 0
    peak = r[0]
    higher = np.nonzero(r[1:] > peak)[0] + 1
    if higher.size == 0:
        return float(peak - r[1:].min())
    h_right = int(higher.min())
    h_left = int(higher.max())
    right_min = r[1:h_right].min() if h_right > 1 else peak
    left_min = r[h_left + 1 :].min() if h_left < n - 1 else peak
    return float(peak - max(left_min, right_min))


def brute_linear_maxima_and_prominence(values):
    """Non-circular local maxima and their prominences, by definition."""
    v = np.asarray(values, dtype=np.float64)
    n = len(v)
    out = {}
    for i in range(1, n - 1):
        if v[i] > v[i - 1] and v[i] > v[i + 1]:
            left = v[:i]
            right = v[i + 1 :]
            hl = np.nonzero(left > v[i])[0]
            lo_l = left[hl.max() + 1 :].min() if hl.size else left.min()
            hr = np.nonzero(right > v[i])[0]
            lo_r = right[: hr.min()].min() if hr.size else right.min()
            out[i] = v[i] - max(lo_l, lo_r)
    return out


def rasterize_shape_reference(kind: str, size: int) -> np.ndarray:
    """Scalar re-derivation of the obstacle stencils."""
    half = (size - 1) / 2.0
    r = size / 2.0
    out = np.zeros((size, size), dtype=bool)
    for row in range(size):
        for col in range(size):
            dy = row - half
            dx = col - half
            if kind == "square":
                member = True
            elif kind == "rectangle":
                member = abs(dy) <= max(size / 4.0, 0.5)
            elif kind == "circle":
                member = dx * dx + dy * dy <= r * r
            elif kind == "diamond":
                member = abs(dx) + abs(dy) <= r
            elif kind == "star":
                member = (abs(dx) + abs(dy) <= r) or (max(abs(dx), abs(dy)) <= 0.6 * r)
            else:
                raise ValueError(kind)
            out[row, col] = member
    return out


def confusion_counts(truth, kept_bits):
    """Plain-loop confusion counts: kept/true-structure combinations."""
    kept_structure = kept_clutter = dropped_structure = 0
    h, w = truth.shape
    for yy in range(h):
        for xx in range(w):
            label = truth[yy, xx]
            kept = bool(kept_bits[yy, xx])
            if label == 1 and kept:
                kept_structure += 1
            elif label == 2 and kept:
                kept_clutter += 1
            elif label == 1 and not kept:
                dropped_structure += 1
    return kept_structure, kept_clutter, dropped_structure


def scan_pgm_pixels(path) -> np.ndarray:
    """Minimal independent P5 reader (binary, single whitespace, maxval 255)."""
    data = open(path, "rb").read()
    assert data[:2] == b"P5"
    fields = []
    pos = 2
    while len(fields) < 3:
        while data[pos : pos + 1].isspace():
            pos += 1
        start = pos
        while not data[pos : pos + 1].isspace():
            pos += 1
        fields.append(int(data[start:pos]))
    w, h, maxval = fields
    assert maxval == 255
    pos += 1
    return np.frombuffer(data[pos : pos + w * h], dtype=np.uint8).reshape(h, w)
