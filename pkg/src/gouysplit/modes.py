"""Hermite-Gauss modes, Gouy phases and finite mode superpositions.

Sign conventions follow a field carrying ``exp(+i k z)``: the free-space
propagator multiplies plane waves by ``exp(+i sqrt(k^2 - q^2) z)``, a mode of
total order ``N`` lags by the Gouy phase ``(N + 1) arctan(z / z_R)`` and the
wavefront curvature term is ``exp(+i z_norm r_norm^2)``. All fields returned
here are envelopes, i.e. the carrier ``exp(i k z)`` is left out.

Mode amplitudes are normalized to unit power in two dimensions,
``\\iint |HG_mn|^2 dx dy = 1``, which requires the ``1 / w(z)`` prefactor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import UnsupportedOrderError

MAX_HERMITE_ORDER = 30


@dataclass(frozen=True)
class BeamParams:
    """Monochromatic paraxial beam with its waist at ``z = 0``.

    Parameters
    ----------
    wavelength : float
        Vacuum wavelength [m].
    w0 : float
        1/e^2 intensity radius at the waist [m].
    """

    wavelength: float
    w0: float

    def __post_init__(self):
        if not (self.wavelength > 0 and math.isfinite(self.wavelength)):
            raise ValueError(f"wavelength must be positive, got {self.wavelength!r}")
        if not (self.w0 > 0 and math.isfinite(self.w0)):
            raise ValueError(f"waist must be positive, got {self.w0!r}")

    @property
    def rayleigh_length(self) -> float:
        return math.pi * self.w0**2 / self.wavelength

    @property
    def wavenumber(self) -> float:
        return 2 * math.pi / self.wavelength

    def width(self, z):
        """Beam radius ``w(z) = w0 sqrt(1 + (z/z_R)^2)``."""
        zn = np.asarray(z, dtype=float) / self.rayleigh_length
        return self.w0 * np.sqrt(1.0 + zn**2)


@dataclass(frozen=True, order=True)
class ModeIndex:
    m: int
    n: int

    def __post_init__(self):
        for name in ("m", "n"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise ValueError(f"mode index {name} must be a non-negative integer, got {value!r}")
            object.__setattr__(self, name, int(value))

    @property
    def order(self) -> int:
        return self.m + self.n


@dataclass(frozen=True)
class NormalizedPoint:
    """A point in beam coordinates ``(x / w(z), y / w(z), z / z_R)``."""

    x_norm: float
    y_norm: float
    z_norm: float

    @classmethod
    def from_physical(cls, params: BeamParams, x, y, z) -> "NormalizedPoint":
        w = float(params.width(z))
        return cls(x / w, y / w, z / params.rayleigh_length)

    def to_physical(self, params: BeamParams):
        z = self.z_norm * params.rayleigh_length
        w = float(params.width(z))
        return self.x_norm * w, self.y_norm * w, z


@dataclass(frozen=True)
class ModeSuperposition:
    """Coherent sum of HG modes sharing one set of beam parameters.

    ``terms`` is a tuple of ``(ModeIndex, coefficient)`` pairs. The total power
    equals ``sum |c|^2`` because the modes are orthonormal.
    """

    params: BeamParams
    terms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        terms = tuple((idx if isinstance(idx, ModeIndex) else ModeIndex(*idx), complex(c))
                      for idx, c in self.terms)
        seen = set()
        for idx, _ in terms:
            if idx in seen:
                raise ValueError(f"duplicate mode {idx} in superposition")
            seen.add(idx)
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_mapping(cls, params: BeamParams, coefficients: Mapping) -> "ModeSuperposition":
        return cls(params, tuple(coefficients.items()))

    @property
    def power(self) -> float:
        return math.fsum(abs(c) ** 2 for _, c in self.terms)

    def coefficients(self) -> dict:
        return {(idx.m, idx.n): c for idx, c in self.terms}

    def normalized(self) -> "ModeSuperposition":
        p = self.power
        if p == 0:
            raise ValueError("cannot normalize an empty superposition")
        scale = 1 / math.sqrt(p)
        return ModeSuperposition(self.params, tuple((i, c * scale) for i, c in self.terms))

    def with_params(self, params: BeamParams) -> "ModeSuperposition":
        return ModeSuperposition(params, self.terms)


def hermite_poly(j: int, u):
    """Physicists' Hermite polynomial ``H_j(u)`` by three-term recurrence.

    Works element-wise on arrays. Orders above 30 are refused.
    """
    if int(j) != j or j < 0:
        raise ValueError(f"Hermite order must be a non-negative integer, got {j!r}")
    if j > MAX_HERMITE_ORDER:
        raise UnsupportedOrderError(
            f"Hermite order {j} exceeds the supported maximum {MAX_HERMITE_ORDER}")
    u = np.asarray(u, dtype=float)
    h_prev = np.ones_like(u)
    if j == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = 2.0 * u
    for k in range(1, int(j)):
        h_prev, h = h, 2.0 * u * h - 2.0 * k * h_prev
    return h if h.ndim else float(h)


def gouy_phase(order: int, z_norm):
    """Gouy phase ``(N + 1) arctan(z_norm)`` of a mode of total order ``N``."""
    return (order + 1) * np.arctan(z_norm)


def _log_norm(*indices) -> float:
    # log of sqrt(2^N prod(j!)), accumulated in floating point
    return 0.5 * sum(j * math.log(2.0) + math.lgamma(j + 1) for j in indices)


def hg_field_1d(m: int, params: BeamParams, x, z=0.0):
    """One-dimensional HG factor with unit norm along ``x``.

    The product ``hg_field_1d(m, p, x, z) * hg_field_1d(n, p, y, z)`` equals
    :func:`hg_field` for mode ``(m, n)``; each factor carries half of the
    Gouy lag, ``(m + 1/2) arctan(z / z_R)``.
    """
    x = np.asarray(x, dtype=float)
    zn = np.asarray(z, dtype=float) / params.rayleigh_length
    w = params.w0 * np.sqrt(1.0 + zn**2)
    xn = x / w
    amp = (2 / math.pi) ** 0.25 * math.exp(-_log_norm(m)) / np.sqrt(w)
    out = (amp * hermite_poly(m, math.sqrt(2.0) * xn)
           * np.exp(-(1 - 1j * zn) * xn**2)
           * np.exp(-1j * (m + 0.5) * np.arctan(zn)))
    return out


def hg_field(mode: ModeIndex, params: BeamParams, x, y, z=0.0):
    """Complex amplitude of ``HG_mn`` at ``(x, y, z)`` [1/m].

    Arguments broadcast against each other.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    zn = np.asarray(z, dtype=float) / params.rayleigh_length
    w = params.w0 * np.sqrt(1.0 + zn**2)
    xn, yn = x / w, y / w
    c_mn = math.sqrt(2 / math.pi) * math.exp(-_log_norm(mode.m, mode.n))
    return (c_mn / w
            * hermite_poly(mode.m, math.sqrt(2.0) * xn)
            * hermite_poly(mode.n, math.sqrt(2.0) * yn)
            * np.exp(-(1 - 1j * zn) * (xn**2 + yn**2))
            * np.exp(-1j * gouy_phase(mode.order, zn)))


def self_splitting_modes(params: BeamParams, theta_c: float) -> ModeSuperposition:
    """The two-term beam ``HG00 - sqrt(2) exp(i theta_c) HG20`` (power 3)."""
    return ModeSuperposition(params, (
        (ModeIndex(0, 0), 1.0 + 0j),
        (ModeIndex(2, 0), -math.sqrt(2.0) * complex(math.cos(theta_c), math.sin(theta_c))),
    ))


def gaussian_mode(params: BeamParams) -> ModeSuperposition:
    return ModeSuperposition(params, ((ModeIndex(0, 0), 1.0 + 0j),))


def evaluate_superposition(s: ModeSuperposition, x, y, z=0.0):
    """Coherent sum of every term's coefficient times its mode field."""
    shape = np.broadcast_shapes(np.shape(x), np.shape(y), np.shape(z))
    out = np.zeros(shape, dtype=complex)
    for idx, c in s.terms:
        out = out + c * hg_field(idx, s.params, x, y, z)
    return out if out.ndim else complex(out)


def terms_by_y_order(s: ModeSuperposition) -> dict:
    """Group terms by their ``n`` index: ``{n: [(m, coefficient), ...]}``."""
    groups: dict = {}
    for idx, c in s.terms:
        groups.setdefault(idx.n, []).append((idx.m, c))
    return dict(sorted(groups.items()))


def on_axis_intensity_law(theta_c, z_norm, params: BeamParams):
    """Closed form of ``|Psi(0, 0, z)|^2`` for the self-splitting beam."""
    w = params.w0 * np.sqrt(1.0 + np.asarray(z_norm, dtype=float) ** 2)
    return 4 * (2 / np.pi) / w**2 * np.cos((np.asarray(theta_c) - 2 * np.arctan(z_norm)) / 2) ** 2
