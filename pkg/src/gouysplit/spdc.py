"""SPDC geometry and the two coincidence engines.

The closed-form engine images the pump, propagated to the effective distance
``Z0``, onto the coincidence rate through the weighted coordinate
``R = eta_s rho_s + eta_i rho_i``. The kernel engine builds the two-photon
amplitude explicitly, summing over pair-creation points in a thin crystal
with one Fresnel kernel chain per arm, which lets optical elements sit in
either arm.

Rates use ``|C2|^2 = 1``. The kernel engine divides out the propagation
Jacobian ``lambda_p Z0 / (lambda_s z_s lambda_i z_i)`` so both engines share
one absolute scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import MisplacedElementError, ResolutionError
from .modes import ModeSuperposition, evaluate_superposition, hg_field_1d, terms_by_y_order
from .propagation import OpticalElement, fresnel_kernel

SCAN_MODES = ("heralded_1d", "heralded_2d", "joint", "counter")
CROSS_CHECK_TOLERANCE = 0.05


@dataclass(frozen=True)
class SpdcGeometry:
    """Pump and signal wavelengths plus crystal-to-detector distances.

    The idler wavelength follows from energy conservation. ``z_i`` may be
    ``inf`` for the single-arm limit.
    """

    lambda_p: float
    lambda_s: float
    z_s: float
    z_i: float

    def __post_init__(self):
        if not (self.lambda_p > 0 and self.lambda_s > 0):
            raise ValueError("wavelengths must be positive")
        if not self.lambda_s > self.lambda_p:
            raise ValueError(
                f"signal wavelength {self.lambda_s} must exceed pump wavelength {self.lambda_p}")
        if not (self.z_s > 0 and self.z_i > 0):
            raise ValueError("arm lengths must be positive")

    @property
    def lambda_i(self) -> float:
        return 1.0 / (1.0 / self.lambda_p - 1.0 / self.lambda_s)

    @property
    def frac_s(self) -> float:
        """``omega_s / omega_p``."""
        return self.lambda_p / self.lambda_s

    @property
    def frac_i(self) -> float:
        return 1.0 - self.frac_s

    @property
    def Z0(self) -> float:
        return 1.0 / (self.frac_s / self.z_s + self.frac_i / self.z_i)

    @property
    def eta_s(self) -> float:
        return self.frac_s * self.Z0 / self.z_s

    @property
    def eta_i(self) -> float:
        return self.frac_i * self.Z0 / self.z_i

    def arm_length(self, arm: str) -> float:
        return {"signal": self.z_s, "idler": self.z_i}[arm]

    def arm_wavelength(self, arm: str) -> float:
        return {"signal": self.lambda_s, "idler": self.lambda_i, "pump": self.lambda_p}[arm]

    @property
    def jacobian(self) -> float:
        return self.lambda_p * self.Z0 / (self.lambda_s * self.z_s * self.lambda_i * self.z_i)


def derive_geometry(lambda_p: float, lambda_s: float, z_s: float, z_i: float) -> SpdcGeometry:
    return SpdcGeometry(float(lambda_p), float(lambda_s), float(z_s), float(z_i))


@dataclass(frozen=True, eq=False)
class ScanConfig:
    """Detector trajectory.

    ``x`` holds the scanned coordinate. ``y`` is only used by
    ``heralded_2d``. ``idler`` is the fixed idler position for the heralded
    modes.
    """

    mode: str
    x: np.ndarray
    y: Optional[np.ndarray] = None
    idler: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.mode not in SCAN_MODES:
            raise ValueError(f"unknown scan mode {self.mode!r}; expected one of {SCAN_MODES}")
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        if self.mode == "heralded_2d":
            if self.y is None:
                raise ValueError("heralded_2d needs y positions")
            object.__setattr__(self, "y", np.asarray(self.y, dtype=float))

    def detector_positions(self):
        """Signal and idler x coordinates for the 1D modes."""
        if self.mode == "heralded_1d":
            return self.x, np.array([float(self.idler[0])])
        if self.mode == "joint":
            return self.x, self.x
        if self.mode == "counter":
            return self.x, -self.x
        raise ValueError("the 2D heralded scan has no 1D detector trajectory")


@dataclass(frozen=True, eq=False)
class CoincidenceProfile:
    positions: np.ndarray
    rates: np.ndarray
    geometry: SpdcGeometry
    provenance: str
    mode: str = "heralded_1d"
    y_positions: Optional[np.ndarray] = None

    def __post_init__(self):
        rates = np.asarray(self.rates, dtype=float)
        if not np.all(np.isfinite(rates)) or np.any(rates < 0):
            raise ValueError("coincidence rates must be finite and non-negative")
        object.__setattr__(self, "rates", rates)
        object.__setattr__(self, "positions", np.asarray(self.positions, dtype=float))


def _check_pump(pump: ModeSuperposition, geom: SpdcGeometry):
    lp = pump.params.wavelength
    if abs(lp - geom.lambda_p) > 1e-12 * geom.lambda_p:
        raise ValueError(f"pump wavelength {lp} differs from geometry lambda_p {geom.lambda_p}")


def pump_profile_at_Z0(pump: ModeSuperposition, geom: SpdcGeometry, x, y=0.0):
    """Pump amplitude ``W(x, y; Z0)``."""
    _check_pump(pump, geom)
    return evaluate_superposition(pump, x, y, geom.Z0)


def weighted_coordinate(geom: SpdcGeometry, scan: ScanConfig):
    """``R`` along the scan: arrays ``(R_x, R_y)``."""
    es, ei = geom.eta_s, geom.eta_i
    xi, yi = (float(v) for v in scan.idler)
    if scan.mode == "heralded_1d":
        return es * scan.x + ei * xi, np.full_like(scan.x, ei * yi)
    if scan.mode == "heralded_2d":
        X, Y = np.meshgrid(scan.x, scan.y, indexing="ij")
        return es * X + ei * xi, es * Y + ei * yi
    if scan.mode == "joint":
        return (es + ei) * scan.x, np.zeros_like(scan.x)
    return (es - ei) * scan.x, np.zeros_like(scan.x)


def scan_closed_form(pump: ModeSuperposition, geom: SpdcGeometry,
                     scan: ScanConfig) -> CoincidenceProfile:
    """Coincidence rate ``|W(R; Z0)|^2`` along a scan."""
    _check_pump(pump, geom)
    rx, ry = weighted_coordinate(geom, scan)
    rates = np.abs(evaluate_superposition(pump, rx, ry, geom.Z0)) ** 2
    return CoincidenceProfile(scan.x, rates, geom, "closed_form", scan.mode,
                              scan.y if scan.mode == "heralded_2d" else None)


@dataclass(frozen=True)
class KernelGrids:
    """Sampling of the kernel engine.

    ``crystal_half_width`` defaults to 8 pump waists. Grids at element planes
    are sized automatically from the local Nyquist limit times
    ``oversample``.
    """

    crystal_points: int = 512
    crystal_half_width: Optional[float] = None
    oversample: float = 1.5
    max_plane_points: int = 16384

    def crystal_axis(self, pump: ModeSuperposition) -> np.ndarray:
        half = self.crystal_half_width or 8 * pump.params.w0
        return np.linspace(-half, half, self.crystal_points)


def _taper(x, lo, hi, margin):
    """1 on ``[lo, hi]``, cos^2 roll-off to 0 over ``margin`` outside it."""
    d = np.maximum(lo - x, x - hi).clip(min=0.0) / margin
    return np.where(d < 1.0, np.cos(0.5 * np.pi * d) ** 2, 0.0)


def _plane_windows(x0, x_det, z_det, wavelength, planes):
    """Coordinate hull and taper margin at every intermediate plane."""
    windows = []
    for z in planes:
        t = z / z_det
        lo = (1 - t) * x0.min() + t * x_det.min()
        hi = (1 - t) * x0.max() + t * x_det.max()
        zone = math.sqrt(wavelength * z * (z_det - z) / z_det)
        margin = max(0.25 * (hi - lo), 8 * zone)
        windows.append((lo, hi, margin))
    return windows


def arm_kernel(x0, x_det, z_det: float, wavelength: float,
               elements: Sequence[OpticalElement] = (), grids: KernelGrids = KernelGrids()):
    """Point-source response of one arm from crystal points to detector points.

    Returns an array ``K[j, l]``: amplitude at ``x_det[j]`` for a unit point
    source at ``x0[l]``, passing every element in order. Without elements it
    is the plain Fresnel kernel.
    """
    x0 = np.asarray(x0, dtype=float)
    x_det = np.asarray(x_det, dtype=float)
    elements = sorted(elements, key=lambda e: e.z_plane)
    for e in elements:
        if not 0 < e.z_plane < z_det:
            raise MisplacedElementError(
                f"element at z={e.z_plane} m lies outside the arm (0, {z_det}) m")
    if not elements:
        return fresnel_kernel(x_det, x0, z_det, wavelength)

    planes = [e.z_plane for e in elements]
    windows = _plane_windows(x0, x_det, z_det, wavelength, planes)
    k = 2 * np.pi / wavelength
    z_all = [0.0] + planes + [z_det]
    ext = [(x0.min(), x0.max())] + [(lo - m, hi + m) for lo, hi, m in windows] \
        + [(x_det.min(), x_det.max())]

    def gradient(a, b):
        span = max(abs(ext[b][1] - ext[a][0]), abs(ext[a][1] - ext[b][0]))
        return k * span / abs(z_all[b] - z_all[a])

    x_prev, dx_prev, matrix = x0, None, None
    for i, (e, (lo, hi, margin)) in enumerate(zip(elements, windows), start=1):
        g = gradient(i - 1, i) + gradient(i, i + 1)
        step = np.pi / g / grids.oversample
        n = int(math.ceil((hi - lo + 2 * margin) / step)) + 1
        if n > grids.max_plane_points:
            raise ResolutionError(
                f"element plane z={e.z_plane} m needs {n} samples (> {grids.max_plane_points})")
        xm = np.linspace(lo - margin, hi + margin, n)
        t = e.transmission(xm) * _taper(xm, lo, hi, margin)
        hop = fresnel_kernel(xm, x_prev, z_all[i] - z_all[i - 1], wavelength)
        matrix = hop if matrix is None else (hop * dx_prev) @ matrix
        matrix = t[:, None] * matrix
        x_prev, dx_prev = xm, xm[1] - xm[0]
    last = fresnel_kernel(x_det, x_prev, z_det - z_all[-2], wavelength) * dx_prev
    return last @ matrix


def _line_inputs(pump: ModeSuperposition, x0):
    """Crystal-plane x factors ``f_n(x0)`` for each y order ``n``."""
    inputs = {}
    for n, pairs in terms_by_y_order(pump).items():
        inputs[n] = sum(c * hg_field_1d(m, pump.params, x0, 0.0) for m, c in pairs)
    return inputs


def propagate_line(pump: ModeSuperposition, x_out, z_out: float,
                   elements: Sequence[OpticalElement] = (),
                   grids: KernelGrids = KernelGrids()):
    """Field of a mode superposition along ``y = 0`` after ``z_out`` of free
    space with y-invariant elements in the way.

    Without elements this reproduces ``evaluate_superposition(pump, x, 0, z)``.
    """
    x0 = grids.crystal_axis(pump)
    dx0 = x0[1] - x0[0]
    kern = arm_kernel(x0, x_out, z_out, pump.params.wavelength, elements, grids)
    out = 0
    for n, f in _line_inputs(pump, x0).items():
        out = out + (kern @ f) * dx0 * hg_field_1d(n, pump.params, 0.0, z_out)
    return np.asarray(out)


def _kernel_rates(pump, geom, elements, scan, grids):
    x0 = grids.crystal_axis(pump)
    dx0 = x0[1] - x0[0]
    xs, xi = scan.detector_positions()
    by_arm = {"signal": [], "idler": []}
    for e in elements:
        if e.arm not in by_arm:
            raise ValueError(f"kernel engine elements must sit in the signal or idler arm, "
                             f"got {e.arm!r}")
        by_arm[e.arm].append(e)
    ks = arm_kernel(x0, xs, geom.z_s, geom.lambda_s, by_arm["signal"], grids)
    ki = arm_kernel(x0, xi, geom.z_i, geom.lambda_i, by_arm["idler"], grids)
    ry = geom.eta_i * float(scan.idler[1]) if scan.mode == "heralded_1d" else 0.0
    amp = 0
    for n, f in _line_inputs(pump, x0).items():
        if scan.mode == "heralded_1d":
            part = ks @ (f * ki[0] * dx0)
        else:
            part = (ks * ki) @ f * dx0
        amp = amp + part * hg_field_1d(n, pump.params, ry, geom.Z0)
    return np.abs(amp) ** 2 / geom.jacobian


def relative_linf(a, b) -> float:
    """``max |a - b| / max |b|``."""
    scale = np.max(np.abs(b))
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))) / scale) if scale > 0 else 0.0


def biphoton_kernel_scan(pump: ModeSuperposition, geom: SpdcGeometry,
                         elements: Sequence[OpticalElement], scan: ScanConfig,
                         grids: KernelGrids = KernelGrids(), check: bool = True
                         ) -> CoincidenceProfile:
    """Coincidence profile from the explicit two-photon amplitude.

    ``Psi(x_s, x_i) = sum_x0 W(x0; 0) K_s(x_s, x0) K_i(x_i, x0) dx0`` where each
    ``K`` chains Fresnel propagation and the elements of its arm. Only the
    x direction is sampled; the y dependence of free-space propagation is
    applied analytically, which is exact because elements do not vary in y.

    With ``check`` the same grids are run once more with every element made
    transparent and compared with :func:`scan_closed_form`.

    Raises
    ------
    ResolutionError
        If that cross-check differs by more than 5% (relative L-infinity).
    MisplacedElementError
        If an element is not strictly between the crystal and its detector.
    """
    _check_pump(pump, geom)
    if scan.mode == "heralded_2d":
        raise ValueError("the kernel engine is one-dimensional; use scan_closed_form for 2D maps")
    elements = list(elements)
    for e in elements:
        if e.arm in ("signal", "idler") and not 0 < e.z_plane < geom.arm_length(e.arm):
            raise MisplacedElementError(
                f"element at z={e.z_plane} m lies outside the {e.arm} arm (0, "
                f"{geom.arm_length(e.arm)}) m")
    rates = _kernel_rates(pump, geom, elements, scan, grids)
    if check:
        reference = scan_closed_form(pump, geom, scan).rates
        if elements:
            bare = _kernel_rates(pump, geom, [e.transparent() for e in elements], scan, grids)
        else:
            bare = rates
        err = relative_linf(bare, reference)
        if err > CROSS_CHECK_TOLERANCE:
            raise ResolutionError(
                f"kernel engine deviates from the closed form by {err:.3g} with elements "
                f"removed; refine the grids")
    return CoincidenceProfile(scan.x, rates, geom, "kernel_engine", scan.mode)
