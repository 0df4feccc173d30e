"""Figure-level observables extracted from 1D profiles.

Every function accepts either ``(x, values)`` arrays, an ``(x, values)``
tuple, or a single :class:`~gouysplit.spdc.CoincidenceProfile`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.signal
from scipy.integrate import trapezoid

from .errors import GridMismatchError, InsufficientFringesError, UndefinedVisibilityError

DEFAULT_PROMINENCE = 0.05
MIN_PEAK_SAMPLES = 16
MIN_SPECTRAL_SAMPLES = 64
SPECTRAL_PAD = 1 << 16


@dataclass(frozen=True)
class PeakSet:
    positions: np.ndarray
    heights: np.ndarray

    def __len__(self):
        return len(self.positions)

    @property
    def separation(self) -> float:
        """Distance between the outermost peaks, 0 for fewer than two."""
        return float(self.positions[-1] - self.positions[0]) if len(self) > 1 else 0.0


@dataclass(frozen=True)
class FringeReport:
    spacing: float
    visibility: float
    method: str


def _xy(x, values=None):
    if values is None and isinstance(x, tuple):
        x, values = x
    if values is None:
        return np.asarray(x.positions, dtype=float), np.asarray(x.rates, dtype=float)
    x = np.asarray(x, dtype=float)
    values = np.asarray(values, dtype=float)
    if x.shape != values.shape or x.ndim != 1:
        raise ValueError("positions and values must be 1D arrays of equal length")
    return x, values


def _parabolic(y, i):
    """Sub-sample offset of the vertex through samples ``i-1, i, i+1``."""
    if i <= 0 or i >= len(y) - 1:
        return 0.0, y[i]
    a, b, c = y[i - 1], y[i], y[i + 1]
    denom = a - 2 * b + c
    if denom == 0:
        return 0.0, b
    offset = 0.5 * (a - c) / denom
    return offset, b - 0.25 * (a - c) * offset


def find_peaks(x, values=None, min_prominence: float = DEFAULT_PROMINENCE) -> PeakSet:
    """Local maxima whose prominence is at least ``min_prominence`` of the
    global maximum, refined by a three-point parabola."""
    x, y = _xy(x, values)
    if len(y) < MIN_PEAK_SAMPLES:
        raise ValueError(f"need at least {MIN_PEAK_SAMPLES} samples, got {len(y)}")
    top = y.max()
    if not top > 0:
        return PeakSet(np.empty(0), np.empty(0))
    idx, _ = scipy.signal.find_peaks(y, prominence=min_prominence * top)
    dx = x[1] - x[0]
    positions, heights = [], []
    for i in idx:
        offset, h = _parabolic(y, i)
        positions.append(x[i] + offset * dx)
        heights.append(h)
    return PeakSet(np.array(positions), np.array(heights))


def _dominant_frequency(x, y):
    n = max(SPECTRAL_PAD, 4 * len(y))
    spectrum = np.abs(np.fft.rfft(y - y.mean(), n))
    freqs = np.fft.rfftfreq(n, x[1] - x[0])
    # the zero-frequency lobe (envelope and window) ends at the first minimum
    # of the raw spectrum; search for the fringe peak beyond it
    raw = np.abs(np.fft.rfft(y, n))
    i = 1
    while i < len(raw) - 1 and raw[i + 1] <= raw[i]:
        i += 1
    if i >= len(spectrum) - 2:
        return None
    j = i + int(np.argmax(spectrum[i:]))
    if spectrum[j] < 0.05 * spectrum.max():
        return None
    offset, _ = _parabolic(spectrum, j)
    return freqs[j] + offset * (freqs[1] - freqs[0])


def fringe_spacing(x, values=None, method: str = "spectral_peak") -> FringeReport:
    """Fringe period of a profile.

    ``spectral_peak`` takes the strongest spatial frequency beyond the
    zero-frequency lobe of the mean-subtracted profile; ``peak_to_peak``
    averages the distance between adjacent maxima.

    Raises
    ------
    InsufficientFringesError
        Fewer than two fringes across the profile.
    """
    x, y = _xy(x, values)
    vis = visibility(x, y)
    if method == "spectral_peak":
        if len(y) < MIN_SPECTRAL_SAMPLES:
            raise ValueError(f"spectral_peak needs at least {MIN_SPECTRAL_SAMPLES} samples")
        f = _dominant_frequency(x, y)
        span = x[-1] - x[0]
        if f is None or f * span < 2:
            raise InsufficientFringesError("no dominant fringe frequency in the profile")
        return FringeReport(1.0 / f, vis, method)
    if method == "peak_to_peak":
        peaks = find_peaks(x, y)
        interior = [p for p in peaks.positions if x[0] < p < x[-1]]
        if len(interior) < 2:
            raise InsufficientFringesError(f"found {len(interior)} maxima, need at least 2")
        return FringeReport(float(np.mean(np.diff(interior))), vis, method)
    raise ValueError(f"unknown method {method!r}")


def visibility(x, values=None, window=None) -> float:
    """``(max - min) / (max + min)`` over ``window = (lo, hi)`` or the whole profile."""
    if hasattr(x, "rates") and values is not None and window is None:
        values, window = None, values
    x, y = _xy(x, values)
    if window is not None:
        lo, hi = window
        if lo < x[0] or hi > x[-1] or not hi > lo:
            raise ValueError(f"window {window} is not inside the scan range [{x[0]}, {x[-1]}]")
        y = y[(x >= lo) & (x <= hi)]
        if y.size == 0:
            raise ValueError("window contains no samples")
    top, bottom = y.max(), y.min()
    if top + bottom == 0:
        raise UndefinedVisibilityError("visibility undefined: max + min = 0")
    return float((top - bottom) / (top + bottom))


def depletion_ratio(with_obstacle, without) -> float:
    """Integrated rate with the obstacle over the integrated rate without it."""
    xa, ya = _xy(with_obstacle)
    xb, yb = _xy(without)
    if xa.shape != xb.shape or not np.array_equal(xa, xb):
        raise GridMismatchError("profiles were sampled on different scan grids")
    return float(trapezoid(ya, xa) / trapezoid(yb, xb))


def rms_width(x, values=None) -> float:
    """Twice the intensity-weighted standard deviation; equals the 1/e^2
    radius for a Gaussian."""
    x, y = _xy(x, values)
    total = trapezoid(y, x)
    mean = trapezoid(x * y, x) / total
    return float(2 * np.sqrt(trapezoid((x - mean) ** 2 * y, x) / total))


def main_peak_position(x, values=None) -> float:
    """Parabola-refined position of the global maximum."""
    x, y = _xy(x, values)
    i = int(np.argmax(y))
    offset, _ = _parabolic(y, i)
    return float(x[i] + offset * (x[1] - x[0]))
