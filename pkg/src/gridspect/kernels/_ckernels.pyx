# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: polar spectrum resampling and Hough segment walks.

Float expressions mirror kernels/pure.py term for term; together with
-ffp-contract=off this keeps both backends bit-identical.
"""

import numpy as np

from libc.math cimport floor


def unfold_amplitude(double[:, ::1] amp, double cx, double cy,
                     double[::1] cos_phi, double[::1] sin_phi,
                     double[::1] radii):
    """Bilinearly sample ``amp`` on a polar grid centered at (cx, cy)."""
    cdef Py_ssize_t n_phi = cos_phi.shape[0]
    cdef Py_ssize_t n_r = radii.shape[0]
    cdef Py_ssize_t hi = amp.shape[0] - 1
    out_arr = np.empty((n_phi, n_r), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, ix0, iy0, ix1, iy1
    cdef double x, y, fx, fy, w00, w01, w10, w11

    for i in range(n_phi):
        for j in range(n_r):
            x = cx + cos_phi[i] * radii[j]
            y = cy + sin_phi[i] * radii[j]
            fx = x - floor(x)
            fy = y - floor(y)
            ix0 = <Py_ssize_t>floor(x)
            iy0 = <Py_ssize_t>floor(y)
            if ix0 < 0:
                ix0 = 0
            elif ix0 > hi:
                ix0 = hi
            if iy0 < 0:
                iy0 = 0
            elif iy0 > hi:
                iy0 = hi
            ix1 = ix0 + 1
            if ix1 > hi:
                ix1 = hi
            iy1 = iy0 + 1
            if iy1 > hi:
                iy1 = hi
            w00 = (1.0 - fx) * (1.0 - fy)
            w01 = fx * (1.0 - fy)
            w10 = (1.0 - fx) * fy
            w11 = fx * fy
            out[i, j] = (w00 * amp[iy0, ix0] + w01 * amp[iy0, ix1]) + \
                        (w10 * amp[iy1, ix0] + w11 * amp[iy1, ix1])
    return out_arr


def hough_segments(unsigned char[:, ::1] bits,
                   long long[::1] order_y, long long[::1] order_x,
                   double[::1] ct, double[::1] st,
                   double[::1] dirx, double[::1] diry,
                   double rho_offset, Py_ssize_t n_rho,
                   int votes_threshold, long long min_len_sq, int max_gap):
    """Progressive probabilistic Hough segment extraction.

    Same contract as kernels.pure.hough_segments.
    """
    cdef Py_ssize_t h = bits.shape[0]
    cdef Py_ssize_t w = bits.shape[1]
    cdef Py_ssize_t n_theta = ct.shape[0]
    cdef Py_ssize_t n_pix = order_y.shape[0]

    rem_arr = np.array(bits, dtype=np.uint8)
    acc_arr = np.zeros((n_theta, n_rho), dtype=np.int32)
    voted_arr = np.zeros((h, w), dtype=np.uint8)
    cdef unsigned char[:, ::1] remaining = rem_arr
    cdef int[:, ::1] acc = acc_arr
    cdef unsigned char[:, ::1] voted = voted_arr

    # walk buffer; a walk visits at most ~2*(w+h) distinct cells
    cells_arr = np.empty((4 * (w + h) + 16, 2), dtype=np.int64)
    cdef long long[:, ::1] cells = cells_arr

    cdef Py_ssize_t i, t, n_cells, c
    cdef Py_ssize_t x, y, best_t, px, py, xx, yy, b
    cdef Py_ssize_t ex1, ey1, ex2, ey2, cxx, cyy
    cdef long long ddx, ddy
    cdef int best_val, gap, d
    cdef double dx, dy, sign, fk
    cdef long long k

    segments = []

    for i in range(n_pix):
        y = <Py_ssize_t>order_y[i]
        x = <Py_ssize_t>order_x[i]
        if remaining[y, x] == 0:
            continue
        best_val = -1
        best_t = 0
        for t in range(n_theta):
            b = <Py_ssize_t>floor(x * ct[t] + y * st[t] + rho_offset)
            acc[t, b] += 1
            if acc[t, b] > best_val:
                best_val = acc[t, b]
                best_t = t
        voted[y, x] = 1
        if best_val < votes_threshold:
            continue

        dx = dirx[best_t]
        dy = diry[best_t]
        cells[0, 0] = x
        cells[0, 1] = y
        n_cells = 1
        ex1 = x
        ey1 = y
        ex2 = x
        ey2 = y
        for d in range(2):
            sign = 1.0 if d == 0 else -1.0
            px = x
            py = y
            gap = 0
            k = 0
            while True:
                k += 1
                fk = sign * k
                xx = <Py_ssize_t>floor(x + fk * dx + 0.5)
                yy = <Py_ssize_t>floor(y + fk * dy + 0.5)
                if xx == px and yy == py:
                    continue
                if xx < 0 or xx >= w or yy < 0 or yy >= h:
                    break
                px = xx
                py = yy
                if remaining[yy, xx] != 0:
                    gap = 0
                    cells[n_cells, 0] = xx
                    cells[n_cells, 1] = yy
                    n_cells += 1
                    if d == 0:
                        ex1 = xx
                        ey1 = yy
                    else:
                        ex2 = xx
                        ey2 = yy
                else:
                    gap += 1
                    if gap > max_gap:
                        break

        ddx = ex2 - ex1
        ddy = ey2 - ey1
        if ddx * ddx + ddy * ddy < min_len_sq:
            continue
        for c in range(n_cells):
            cxx = <Py_ssize_t>cells[c, 0]
            cyy = <Py_ssize_t>cells[c, 1]
            if remaining[cyy, cxx] != 0:
                remaining[cyy, cxx] = 0
                if voted[cyy, cxx] != 0:
                    for t in range(n_theta):
                        b = <Py_ssize_t>floor(cxx * ct[t] + cyy * st[t] + rho_offset)
                        acc[t, b] -= 1
                    voted[cyy, cxx] = 0
        segments.append((ex1, ey1, ex2, ey2))

    return np.array(segments, dtype=np.int64).reshape(-1, 4)
