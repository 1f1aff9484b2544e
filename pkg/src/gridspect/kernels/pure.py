"""Pure NumPy fallback for the compiled kernels.

The arithmetic here is kept expression-for-expression identical to the
Cython versions so that both backends return bit-identical arrays.
"""

import numpy as np


def unfold_amplitude(amp, cx, cy, cos_phi, sin_phi, radii):
    """Bilinearly sample ``amp`` on a polar grid centered at (cx, cy).

    Returns an (n_angles, n_radii) array; sample (i, j) interpolates the
    amplitude at the Cartesian point center + radii[j] * (cos, sin)(phi_i).
    """
    side = amp.shape[0]
    hi = side - 1
    x = cx + np.outer(cos_phi, radii)
    y = cy + np.outer(sin_phi, radii)
    fx = x - np.floor(x)
    fy = y - np.floor(y)
    ix0 = np.clip(np.floor(x).astype(np.intp), 0, hi)
    iy0 = np.clip(np.floor(y).astype(np.intp), 0, hi)
    ix1 = np.minimum(ix0 + 1, hi)
    iy1 = np.minimum(iy0 + 1, hi)
    w00 = (1.0 - fx) * (1.0 - fy)
    w01 = fx * (1.0 - fy)
    w10 = (1.0 - fx) * fy
    w11 = fx * fy
    return (w00 * amp[iy0, ix0] + w01 * amp[iy0, ix1]) + (
        w10 * amp[iy1, ix0] + w11 * amp[iy1, ix1]
    )


def hough_segments(
    bits,
    order_y,
    order_x,
    ct,
    st,
    dirx,
    diry,
    rho_offset,
    n_rho,
    votes_threshold,
    min_len_sq,
    max_gap,
):
    """Progressive probabilistic Hough segment extraction.

    ``bits`` is a uint8 occupancy image; ``order_y``/``order_x`` give the
    (pre-randomized) pixel visit order. ``ct``/``st`` are cos/sin tables
    scaled by 1/rho_step, ``dirx``/``diry`` unit direction vectors of the
    line for each angle bin. Returns an (n, 4) int64 array of segment
    endpoints (x1, y1, x2, y2).
    """
    h, w = bits.shape
    n_theta = ct.shape[0]
    remaining = bits.copy()
    acc = np.zeros((n_theta, n_rho), dtype=np.int32)
    voted = np.zeros((h, w), dtype=np.uint8)
    t_idx = np.arange(n_theta)
    segments = []

    for i in range(order_y.shape[0]):
        y = int(order_y[i])
        x = int(order_x[i])
        if not remaining[y, x]:
            continue
        bins = np.floor(x * ct + y * st + rho_offset).astype(np.intp)
        acc[t_idx, bins] += 1
        voted[y, x] = 1
        vals = acc[t_idx, bins]
        best_t = int(np.argmax(vals))
        if int(vals[best_t]) < votes_threshold:
            continue

        dx = float(dirx[best_t])
        dy = float(diry[best_t])
        cells = [(x, y)]
        ends = [(x, y), (x, y)]
        for d, sign in ((0, 1.0), (1, -1.0)):
            px, py = x, y
            gap = 0
            k = 0
            while True:
                k += 1
                xx = int(np.floor(x + sign * k * dx + 0.5))
                yy = int(np.floor(y + sign * k * dy + 0.5))
                if xx == px and yy == py:
                    continue  # sub-cell step
                if xx < 0 or xx >= w or yy < 0 or yy >= h:
                    break
                px, py = xx, yy
                if remaining[yy, xx]:
                    gap = 0
                    cells.append((xx, yy))
                    ends[d] = (xx, yy)
                else:
                    gap += 1
                    if gap > max_gap:
                        break

        (ex1, ey1), (ex2, ey2) = ends
        ddx = ex2 - ex1
        ddy = ey2 - ey1
        if ddx * ddx + ddy * ddy < min_len_sq:
            continue
        for cx_, cy_ in cells:
            if remaining[cy_, cx_]:
                remaining[cy_, cx_] = 0
                if voted[cy_, cx_]:
                    cbins = np.floor(cx_ * ct + cy_ * st + rho_offset).astype(np.intp)
                    acc[t_idx, cbins] -= 1
                    voted[cy_, cx_] = 0
        segments.append((ex1, ey1, ex2, ey2))

    return np.array(segments, dtype=np.int64).reshape(-1, 4)
