"""Backend parity: the compiled kernels must reproduce the pure NumPy
results bit for bit."""

import numpy as np
import pytest

from gridspect import kernels
from gridspect.evalharness import ClutterSpec, inject_clutter
from gridspect.synthmaps import office_map

pure = kernels.get_backend("pure")
compiled = kernels.get_backend("compiled")

needs_compiled = pytest.mark.skipif(
    compiled is None, reason="compiled kernel extension not built"
)


def hough_args(m, seed=0, votes=20, min_len_sq=100, max_gap=3):
    ys, xs = np.nonzero(m.bits)
    order = np.random.default_rng(seed).permutation(ys.size)
    thetas = np.arange(180, dtype=np.float64) * np.radians(1.0)
    n_rho = 2 * int(np.ceil(np.hypot(m.width, m.height))) + 1
    return (
        np.ascontiguousarray(m.bits.astype(np.uint8)),
        np.ascontiguousarray(ys[order].astype(np.int64)),
        np.ascontiguousarray(xs[order].astype(np.int64)),
        np.cos(thetas),
        np.sin(thetas),
        -np.sin(thetas),
        np.cos(thetas),
        float(n_rho // 2) + 0.5,
        n_rho,
        votes,
        min_len_sq,
        max_gap,
    )


@needs_compiled
class TestUnfoldParity:
    @pytest.mark.parametrize("side,angle_bins", [(32, 90), (128, 720), (65, 360)])
    def test_bit_identical(self, side, angle_bins):
        rng = np.random.default_rng(side)
        amp = np.abs(rng.normal(size=(side, side)))
        phis = np.arange(angle_bins) * (2 * np.pi / angle_bins)
        radii = np.arange(1, side // 2, dtype=np.float64)
        c = float(side // 2)
        args = (np.ascontiguousarray(amp), c, c, np.cos(phis), np.sin(phis), radii)
        assert np.array_equal(pure.unfold_amplitude(*args), compiled.unfold_amplitude(*args))


@needs_compiled
class TestHoughParity:
    def test_structured_map(self):
        m = office_map()
        args = hough_args(m)
        assert np.array_equal(pure.hough_segments(*args), compiled.hough_segments(*args))

    def test_cluttered_maps(self):
        base = office_map()
        for seed in range(3):
            lab = inject_clutter(base, ClutterSpec("random", 60, 7, seed=seed))
            args = hough_args(lab.bits, seed=seed)
            assert np.array_equal(
                pure.hough_segments(*args), compiled.hough_segments(*args)
            )

    def test_random_noise_map(self):
        rng = np.random.default_rng(99)
        from gridspect.grid_map import BinaryMap

        bits = rng.random((80, 80)) < 0.15
        m = BinaryMap(width=80, height=80, bits=bits)
        args = hough_args(m, seed=5, votes=10, min_len_sq=25)
        assert np.array_equal(pure.hough_segments(*args), compiled.hough_segments(*args))


class TestBackendSelection:
    def test_active_backend_exposes_kernels(self):
        assert callable(kernels.unfold_amplitude)
        assert callable(kernels.hough_segments)
        assert kernels.BACKEND in ("pure", "compiled")

    def test_unknown_backend_rejected(self):
        with pytest.raises(ValueError):
            kernels.get_backend("gpu")
