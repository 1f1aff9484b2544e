import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridspect.errors import NotALocalMaximumError
from gridspect.pipeline import analyze_map
from gridspect.spectral import DirectionalProfile
from gridspect.structure import (
    circular_local_maxima,
    find_dominant_directions,
    peak_prominence,
)
from gridspect.synthmaps import rectangle_map

from .oracles import brute_circular_prominence, brute_linear_maxima_and_prominence


class TestCircularProminence:
    def test_isolated_peak(self):
        v = np.zeros(16)
        v[1] = 1.0
        assert peak_prominence(v, 1) == 1.0

    def test_constant_has_no_maxima(self):
        assert circular_local_maxima(np.ones(12)) == []

    def test_not_a_maximum_raises(self):
        v = np.array([0.0, 1.0, 2.0, 1.0, 0.0, 0.0])
        with pytest.raises(NotALocalMaximumError):
            peak_prominence(v, 1)

    def test_wraparound_plateau(self):
        # plateau spanning the wrap: bins n-1, 0, 1 all equal and highest
        v = np.array([5.0, 5.0, 1.0, 2.0, 1.0, 5.0])
        maxima = circular_local_maxima(v)
        assert 3 in maxima  # the interior bump
        wrap = [i for i in maxima if v[i] == 5.0]
        assert len(wrap) == 1

    def test_matches_brute_force_on_random_profiles(self):
        rng = np.random.default_rng(77)
        for _ in range(50):
            v = rng.integers(0, 12, size=32).astype(float)
            for idx in circular_local_maxima(v):
                assert peak_prominence(v, idx) == brute_circular_prominence(v, idx)

    @given(st.integers(min_value=0, max_value=10**6))
    @settings(max_examples=60, deadline=None)
    def test_matches_brute_force_property(self, seed):
        rng = np.random.default_rng(seed)
        v = rng.random(24)
        for idx in circular_local_maxima(v):
            assert peak_prominence(v, idx) == pytest.approx(
                brute_circular_prominence(v, idx), abs=1e-12
            )

    def test_linear_mode_matches_scipy_convention(self):
        rng = np.random.default_rng(5)
        v = rng.random(40)
        for idx, expected in brute_linear_maxima_and_prominence(v).items():
            assert peak_prominence(v, idx, mode="linear") == pytest.approx(expected)


def profile_with_peaks(n_bins, peak_bins, height=1.0, base=0.0):
    v = np.full(n_bins, base)
    for b in peak_bins:
        v[b] = height
    return DirectionalProfile(values=v)


class TestFindDominantDirections:
    def test_rectangle_map_directions(self, rect128):
        dirs = analyze_map(rect128).dirs
        assert dirs.n_peaks == 2
        assert dirs.spectral_angles_deg == pytest.approx((0.0, 90.0), abs=0.5)

    def test_rotated_rectangle_directions(self, rect128_rot30):
        dirs = analyze_map(rect128_rot30).dirs
        assert dirs.n_peaks == 2
        assert dirs.spectral_angles_deg == pytest.approx((30.0, 120.0), abs=1.0)

    def test_twenty_symmetric_peaks_collapse_to_ten(self):
        rng = np.random.default_rng(8)
        n = 720
        v = rng.random(n) * 0.05
        bins = sorted(rng.choice(np.arange(10, 350), size=10, replace=False))
        for b in bins:
            v[b] = 1.0
            v[b + 360] = 1.0  # symmetric partner
        dirs = find_dominant_directions(DirectionalProfile(values=v))
        assert dirs.n_peaks == 10
        assert len(dirs.peak_bins) == 20
        assert not dirs.has_unpaired

    def test_unpaired_peak_flagged(self):
        v = np.zeros(360)
        v[40] = 1.0  # deliberately no partner at bin 220
        dirs = find_dominant_directions(DirectionalProfile(values=v))
        assert dirs.n_peaks == 1
        assert dirs.peaks[0].unpaired

    def test_empty_on_constant_profile(self):
        dirs = find_dominant_directions(DirectionalProfile(values=np.ones(360)))
        assert dirs.n_peaks == 0

    def test_threshold_drops_weak_peaks(self):
        v = np.zeros(360)
        v[10] = v[190] = 1.0
        v[100] = v[280] = 0.3  # prominence below 0.5 after scaling
        dirs = find_dominant_directions(DirectionalProfile(values=v), t=0.5)
        assert dirs.spectral_angles_deg == (10.0,)

    def test_deterministic(self, office):
        a = analyze_map(office).dirs
        b = analyze_map(office).dirs
        assert a == b

    def test_wall_thickness_invariance(self):
        # same geometry, more occupied cells: directions unchanged within a bin
        thin = rectangle_map(side=128, thickness=1.5)
        thick = rectangle_map(side=128, thickness=4.0)
        da = analyze_map(thin).dirs
        db = analyze_map(thick).dirs
        assert da.n_peaks == db.n_peaks == 2
        for a, b in zip(da.spectral_angles_deg, db.spectral_angles_deg):
            assert abs(a - b) <= 0.5

    @pytest.mark.parametrize("delta", [15.0, 30.0, 45.0])
    def test_rotation_shifts_directions(self, delta):
        base = analyze_map(rectangle_map(side=144, margin=28)).dirs
        rot = analyze_map(rectangle_map(side=144, margin=28, angle_deg=delta)).dirs
        assert rot.n_peaks == base.n_peaks == 2
        rotated = sorted((a + delta) % 180.0 for a in base.spectral_angles_deg)
        got = sorted(rot.spectral_angles_deg)
        for a, b in zip(rotated, got):
            d = abs(a - b) % 180.0
            assert min(d, 180.0 - d) <= 1.0

    def test_symmetric_partner_exists_for_real_maps(self, corpus):
        for m in corpus.values():
            dirs = analyze_map(m).dirs
            assert dirs.n_peaks > 0
            assert not dirs.has_unpaired

    def test_wall_angles_are_rotated_spectral_angles(self):
        v = np.zeros(360)
        v[20] = v[200] = 1.0
        dirs = find_dominant_directions(DirectionalProfile(values=v))
        assert dirs.wall_angles_deg == ((20.0 + 90.0) % 180.0,)
