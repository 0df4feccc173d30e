"""Sampled fields, spectral propagation, Fresnel transfer matrices and thin
optical elements.

Fields are envelopes relative to the carrier ``exp(i k z)``, matching
:mod:`gouysplit.modes`, so a numerically propagated grid can be compared with
an analytic mode evaluation directly.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import MisplacedElementError, WindowingError
from .modes import ModeSuperposition, evaluate_superposition

SPECTRAL_EDGE_TOLERANCE = 1e-6
SPATIAL_EDGE_TOLERANCE = 1e-3
EDGE_FRACTION = 0.10


@dataclass(frozen=True)
class GridSpec:
    """Uniform sampling window, endpoints included.

    A 1D grid leaves the ``y`` fields as ``None``.
    """

    x_min: float
    x_max: float
    nx: int
    y_min: Optional[float] = None
    y_max: Optional[float] = None
    ny: Optional[int] = None

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ValueError(f"degenerate x window [{self.x_min}, {self.x_max}]")
        if self.nx < 2:
            raise ValueError("need at least 2 samples along x")
        if self.is_2d:
            if self.y_max is None or not self.y_max > self.y_min:
                raise ValueError(f"degenerate y window [{self.y_min}, {self.y_max}]")
            if self.ny is None or self.ny < 2:
                raise ValueError("need at least 2 samples along y")

    @classmethod
    def centered(cls, half_width: float, nx: int, ny: Optional[int] = None) -> "GridSpec":
        if ny is None:
            return cls(-half_width, half_width, nx)
        return cls(-half_width, half_width, nx, -half_width, half_width, ny)

    @property
    def is_2d(self) -> bool:
        return self.y_min is not None

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def y(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.ny)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def dy(self) -> float:
        return (self.y_max - self.y_min) / (self.ny - 1)

    @property
    def shape(self) -> tuple:
        return (self.nx, self.ny) if self.is_2d else (self.nx,)

    def mesh(self):
        """``(X, Y)`` arrays indexed ``[ix, iy]``."""
        return np.meshgrid(self.x, self.y, indexing="ij")


@dataclass(frozen=True, eq=False)
class FieldGrid:
    """Complex envelope samples on a :class:`GridSpec` at plane ``z_plane``."""

    samples: np.ndarray
    grid: GridSpec
    z_plane: float
    wavelength: float

    def __post_init__(self):
        a = np.array(self.samples, dtype=complex)
        if a.shape != self.grid.shape:
            raise ValueError(f"samples shape {a.shape} does not match grid {self.grid.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "samples", a)
        if not self.wavelength > 0:
            raise ValueError("wavelength must be positive")

    @property
    def x(self):
        return self.grid.x

    @property
    def y(self):
        return self.grid.y

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.samples) ** 2

    def replace(self, samples=None, z_plane=None) -> "FieldGrid":
        return FieldGrid(self.samples if samples is None else samples, self.grid,
                         self.z_plane if z_plane is None else z_plane, self.wavelength)


def sample_grid(s: ModeSuperposition, grid: GridSpec, z: float = 0.0) -> FieldGrid:
    """Evaluate a superposition on every grid node at plane ``z``."""
    w = float(s.params.width(z))
    half_span = min(grid.x_max - grid.x_min, (grid.y_max - grid.y_min) if grid.is_2d else np.inf) / 2
    if half_span < 3 * w:
        warnings.warn(f"sampling window ({2 * half_span:.3g} m) is narrower than 6 beam widths "
                      f"({6 * w:.3g} m)", RuntimeWarning, stacklevel=2)
    if grid.is_2d:
        X, Y = grid.mesh()
    else:
        X, Y = grid.x, np.zeros(grid.nx)
    if s.terms:
        values = evaluate_superposition(s, X, Y, z)
    else:
        values = np.zeros(grid.shape, dtype=complex)
    return FieldGrid(values, grid, float(z), s.params.wavelength)


def total_power(f: FieldGrid) -> float:
    """Riemann sum of ``|u|^2`` times the cell size, compensated summation."""
    cell = f.grid.dx * (f.grid.dy if f.grid.is_2d else 1.0)
    return math.fsum(np.abs(f.samples).ravel() ** 2) * cell


def _edge_mask(shape, fraction=EDGE_FRACTION, fft_order=False):
    """Boolean mask of the outer band of a window (``fraction`` of each axis in total)."""
    mask = np.zeros(shape, dtype=bool)
    for axis, n in enumerate(shape):
        if fft_order:
            # distance from the zero frequency, in units of the Nyquist span
            pos = np.abs(np.fft.fftfreq(n)) * 2
        else:
            pos = np.abs(np.linspace(-1.0, 1.0, n))
        band = pos > 1.0 - fraction
        sl = [np.newaxis] * len(shape)
        sl[axis] = slice(None)
        mask |= band[tuple(sl)]
    return mask


def _edge_fraction(values, fft_order=False):
    p = np.abs(values) ** 2
    total = p.sum()
    if total == 0:
        return 0.0
    return float(p[_edge_mask(values.shape, fft_order=fft_order)].sum() / total)


def _spatial_frequencies(grid: GridSpec):
    qx = 2 * np.pi * np.fft.fftfreq(grid.nx, d=grid.dx)
    if not grid.is_2d:
        return qx**2
    qy = 2 * np.pi * np.fft.fftfreq(grid.ny, d=grid.dy)
    return qx[:, None] ** 2 + qy[None, :] ** 2


def propagate_angular_spectrum(f: FieldGrid, delta_z: float) -> FieldGrid:
    """Free-space propagation by ``delta_z`` in the plane-wave basis.

    Each spatial frequency ``q`` is multiplied by
    ``exp(i (sqrt(k^2 - q^2) - k) delta_z)``; the ``-k`` removes the carrier.
    Evanescent components are set to zero.

    Raises
    ------
    WindowingError
        If more than 1e-3 of the output power sits in the outer 10% of the
        window, i.e. the beam outgrew the grid.
    """
    spectrum = np.fft.fftn(f.samples)
    if _edge_fraction(spectrum, fft_order=True) > SPECTRAL_EDGE_TOLERANCE:
        warnings.warn("field is under-sampled: spectral energy near the Nyquist edge",
                      RuntimeWarning, stacklevel=2)
    k = 2 * np.pi / f.wavelength
    q2 = _spatial_frequencies(f.grid)
    propagating = q2 < k**2
    kz = np.sqrt(np.where(propagating, k**2 - q2, 0.0))
    # kz - k written without cancellation
    phase = np.where(propagating, -q2 / (k + kz), 0.0) * delta_z
    transfer = np.where(propagating, np.exp(1j * phase), 0.0)
    out = np.fft.ifftn(spectrum * transfer)
    if delta_z != 0 and _edge_fraction(out) > SPATIAL_EDGE_TOLERANCE:
        raise WindowingError(
            f"propagation by {delta_z:.4g} m pushed the beam to the window edge; widen the grid")
    return f.replace(samples=out, z_plane=f.z_plane + delta_z)


@dataclass(frozen=True)
class OpticalElement:
    """Thin element at ``z_plane`` in one arm, invariant along ``y``.

    ``opaque_strip`` blocks ``|x - x_center| <= width / 2``.
    ``phase_patch`` adds ``exp(i phase)`` on its region: centered on
    ``x_center`` for ``side='centered'``, otherwise the band of the given
    width directly left (``x_center - width <= x < x_center``) or right of
    ``x_center``.
    """

    kind: str
    arm: str
    z_plane: float
    x_center: float = 0.0
    width: float = 1.2e-3
    phase: float = 0.0
    side: str = "centered"

    KINDS = ("opaque_strip", "phase_patch")
    ARMS = ("pump", "signal", "idler")
    SIDES = ("left", "right", "centered")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown element kind {self.kind!r}")
        if self.arm not in self.ARMS:
            raise ValueError(f"unknown arm {self.arm!r}")
        if self.side not in self.SIDES:
            raise ValueError(f"unknown side {self.side!r}")
        if not self.width > 0:
            raise ValueError("element width must be positive")

    def region(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "opaque_strip" or self.side == "centered":
            return np.abs(x - self.x_center) <= self.width / 2
        if self.side == "left":
            return (x >= self.x_center - self.width) & (x < self.x_center)
        return (x > self.x_center) & (x <= self.x_center + self.width)

    def transmission(self, x) -> np.ndarray:
        inside = self.region(x)
        if self.kind == "opaque_strip":
            return np.where(inside, 0.0, 1.0).astype(complex)
        return np.where(inside, np.exp(1j * self.phase), 1.0 + 0j)

    def moved(self, arm=None, z_plane=None) -> "OpticalElement":
        return OpticalElement(self.kind, arm or self.arm,
                              self.z_plane if z_plane is None else z_plane,
                              self.x_center, self.width, self.phase, self.side)

    def transparent(self) -> "OpticalElement":
        """Same placement, unit transmission everywhere."""
        return OpticalElement("phase_patch", self.arm, self.z_plane, self.x_center,
                              self.width, 0.0, "centered")


def apply_element(f: FieldGrid, e: OpticalElement) -> FieldGrid:
    """Multiply a field by an element's transmission.

    Raises
    ------
    MisplacedElementError
        If the element plane differs from the field plane by more than one
        grid spacing.
    """
    tol = max(f.grid.dx, f.grid.dy if f.grid.is_2d else 0.0)
    if abs(e.z_plane - f.z_plane) > tol:
        raise MisplacedElementError(
            f"element at z={e.z_plane:.6g} m applied to field at z={f.z_plane:.6g} m")
    t = e.transmission(f.grid.x)
    if f.grid.is_2d:
        t = t[:, None]
    return f.replace(samples=f.samples * t)


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    """Dense discretized propagator: ``out = kernel @ samples_in``.

    The input cell size is folded into ``kernel``.
    """

    kernel: np.ndarray
    grid_in: GridSpec
    grid_out: GridSpec
    delta_z: float
    wavelength: float

    def apply(self, samples) -> np.ndarray:
        return self.kernel @ np.asarray(samples)

    def __call__(self, f: FieldGrid) -> FieldGrid:
        if f.grid != self.grid_in:
            raise ValueError("field grid does not match the transfer matrix input grid")
        return FieldGrid(self.apply(f.samples), self.grid_out, f.z_plane + self.delta_z,
                         self.wavelength)

    def then(self, other: "TransferMatrix") -> "TransferMatrix":
        """Compose: apply ``self`` first, ``other`` second."""
        if other.grid_in != self.grid_out:
            raise ValueError("grids of composed transfer matrices do not line up")
        return TransferMatrix(other.kernel @ self.kernel, self.grid_in, other.grid_out,
                              self.delta_z + other.delta_z, self.wavelength)


def fresnel_kernel(x_out, x_in, delta_z: float, wavelength: float) -> np.ndarray:
    """Point-source response ``exp(i k (x_out - x_in)^2 / 2dz) / sqrt(i lambda dz)``."""
    k = 2 * np.pi / wavelength
    dx = np.subtract.outer(np.asarray(x_out, dtype=float), np.asarray(x_in, dtype=float))
    prefactor = np.exp(-1j * np.pi / 4) / math.sqrt(wavelength * delta_z)
    return prefactor * np.exp(1j * k * dx**2 / (2 * delta_z))


def fresnel_transfer_1d(grid_in: GridSpec, grid_out: GridSpec, delta_z: float,
                        wavelength: float) -> TransferMatrix:
    """Direct quadrature of the 1D Fresnel integral between two grids."""
    if grid_in.is_2d or grid_out.is_2d:
        raise ValueError("fresnel_transfer_1d works on 1D grids")
    if delta_z == 0:
        raise ValueError("delta_z = 0: use the identity instead of a Fresnel kernel")
    if delta_z < 0:
        raise ValueError("delta_z must be positive")
    kernel = fresnel_kernel(grid_out.x, grid_in.x, delta_z, wavelength) * grid_in.dx
    return TransferMatrix(kernel, grid_in, grid_out, float(delta_z), float(wavelength))
