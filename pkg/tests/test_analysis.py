import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gouysplit.analysis import (depletion_ratio, find_peaks, fringe_spacing, main_peak_position,
                                rms_width, visibility)
from gouysplit.errors import GridMismatchError, InsufficientFringesError, UndefinedVisibilityError
from gouysplit.modes import (BeamParams, evaluate_superposition, gaussian_mode,
                             self_splitting_modes)
from gouysplit.spdc import ScanConfig, derive_geometry, scan_closed_form

P = BeamParams(405e-9, 1e-4)
X = np.linspace(-1e-2, 1e-2, 1001)


class TestPeaks:
    def test_selfsplit_lobes(self):
        x = np.linspace(-4 * P.w0, 4 * P.w0, 801)
        y = np.abs(evaluate_superposition(self_splitting_modes(P, math.pi), x, 0.0, 0.0)) ** 2
        peaks = find_peaks(x, y)
        assert len(peaks) == 2
        np.testing.assert_allclose(peaks.positions, [-P.w0, P.w0], atol=x[1] - x[0])
        assert peaks.separation == pytest.approx(2 * P.w0, abs=2 * (x[1] - x[0]))

    def test_gaussian_single_peak(self):
        x = np.linspace(-4 * P.w0, 4 * P.w0, 401)
        y = np.abs(evaluate_superposition(gaussian_mode(P), x, 0.0, 0.0)) ** 2
        peaks = find_peaks(x, y)
        assert len(peaks) == 1 and abs(peaks.positions[0]) < 1e-12
        assert peaks.separation == 0.0

    def test_flat_and_zero(self):
        assert len(find_peaks(X, np.ones_like(X))) == 0
        assert len(find_peaks(X, np.zeros_like(X))) == 0

    def test_too_short(self):
        with pytest.raises(ValueError):
            find_peaks(np.arange(5.0), np.arange(5.0))

    def test_accepts_profile(self):
        g = derive_geometry(405e-9, 780e-9, 0.6, 0.6)
        prof = scan_closed_form(gaussian_mode(P), g, ScanConfig("joint", X))
        assert len(find_peaks(prof)) == 1

    @settings(max_examples=30, deadline=None)
    @given(st.floats(-3e-3, 3e-3), st.floats(1e-3, 1e3))
    def test_translation_and_scale(self, shift, scale):
        y = np.exp(-((X - 1e-3) / 5e-4) ** 2) + 0.6 * np.exp(-((X + 2e-3) / 5e-4) ** 2)
        base = find_peaks(X, y)
        moved = find_peaks(X + shift, scale * y)
        np.testing.assert_allclose(moved.positions, base.positions + shift, atol=1e-12)
        np.testing.assert_allclose(moved.heights, scale * base.heights, rtol=1e-12)

    def test_main_peak_subsample(self):
        y = np.exp(-((X - 3.3e-5) / 1e-3) ** 2)
        assert main_peak_position(X, y) == pytest.approx(3.3e-5, abs=(X[1] - X[0]) / 20)


class TestFringes:
    @pytest.mark.parametrize("d", [3e-4, 1e-3, 2.5e-3])
    def test_cos2(self, d):
        y = np.cos(math.pi * X / d) ** 2
        for method in ("spectral_peak", "peak_to_peak"):
            rep = fringe_spacing(X, y, method)
            assert rep.spacing == pytest.approx(d, rel=1e-2)
            assert rep.method == method
        if d == 1e-3:
            # zeros of the pattern fall on grid nodes
            assert fringe_spacing(X, y).visibility == pytest.approx(1.0, abs=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(3e-4, 3e-3), st.floats(0, 10))
    def test_background_invariance(self, d, bg):
        y = np.cos(math.pi * X / d) ** 2
        a = fringe_spacing(X, y).spacing
        b = fringe_spacing(X, y + bg).spacing
        assert b == pytest.approx(a, rel=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(3e-4, 2e-3), st.floats(0.3, 1.0), st.floats(2e-3, 4.5e-3))
    def test_methods_agree_on_enveloped_fringes(self, d, contrast, env):
        # well formed: envelope vanishes at the window edge, several fringes under it
        y = (1 + contrast * np.cos(2 * math.pi * X / d)) * np.exp(-(X / env) ** 2)
        try:
            p2p = fringe_spacing(X, y, "peak_to_peak").spacing
        except InsufficientFringesError:
            return
        if env < 2 * d:
            return
        assert fringe_spacing(X, y, "spectral_peak").spacing == pytest.approx(p2p, rel=0.1)

    def test_monotone_raises(self):
        for method in ("spectral_peak", "peak_to_peak"):
            with pytest.raises(InsufficientFringesError):
                fringe_spacing(X, np.exp(X * 100), method)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            fringe_spacing(X, np.cos(X * 1e4) ** 2, "wavelet")


class TestVisibility:
    def test_basic(self):
        assert visibility(X, np.cos(math.pi * X / 1e-3) ** 2) == pytest.approx(1.0, abs=1e-12)
        assert visibility(X, np.full_like(X, 2.0)) == 0.0

    def test_undefined(self):
        with pytest.raises(UndefinedVisibilityError):
            visibility(X, np.zeros_like(X))

    def test_window(self):
        y = np.where(X < 0, 1.0, 3.0)
        assert visibility(X, y, (1e-3, 5e-3)) == 0.0
        assert visibility(X, y) == pytest.approx(0.5)
        with pytest.raises(ValueError):
            visibility(X, y, (-1.0, 0.0))

    def test_on_axis_joint_window(self):
        # effective phase pi/2 at Z0: on-axis intensity is half the cos^2 maximum
        g = derive_geometry(405e-9, 780e-9, 0.6, 0.6)
        theta = math.pi / 2 + 2 * math.atan(g.Z0 / P.rayleigh_length)
        x = np.linspace(-1e-3, 1e-3, 2001)
        prof = scan_closed_form(self_splitting_modes(P, theta), g, ScanConfig("joint", x))
        w = float(P.width(g.Z0))
        law = 4 * (2 / math.pi) / w**2 * math.cos(math.pi / 4) ** 2
        assert prof.rates[1000] == pytest.approx(law, rel=1e-10)
        v = visibility(prof, (-w / 2, w / 2))
        inside = prof.rates[np.abs(x) <= w / 2]
        lo, hi = inside.min(), inside.max()
        assert v == pytest.approx((hi - lo) / (hi + lo), rel=1e-12)

    @given(st.lists(st.floats(0, 1e6), min_size=2, max_size=50))
    def test_range(self, values):
        y = np.array(values)
        if y.max() + y.min() == 0:
            return
        v = visibility(np.arange(len(y), dtype=float), y)
        assert 0 <= v <= 1
        if y.min() == 0:
            assert v == 1
        elif y.min() > 1e-9 * y.max():
            assert v < 1


class TestDepletion:
    def test_trivial(self):
        y = np.exp(-(X / 1e-3) ** 2)
        assert depletion_ratio((X, y), (X, y)) == 1.0
        assert depletion_ratio((X, 0 * y), (X, y)) == 0.0

    def test_mismatch(self):
        with pytest.raises(GridMismatchError):
            depletion_ratio((X, X**2), (X[:-1], X[:-1] ** 2))

    def test_monotone_in_width(self):
        y = np.exp(-(X / 2e-3) ** 2)
        ratios = [depletion_ratio((X, np.where(np.abs(X) <= w / 2, 0, y)), (X, y))
                  for w in np.linspace(0, 8e-3, 17)]
        assert all(b <= a for a, b in zip(ratios, ratios[1:]))


def test_rms_width_of_gaussian():
    w = 1.3e-3
    assert rms_width(X, np.exp(-2 * X**2 / w**2)) == pytest.approx(w, rel=1e-6)
