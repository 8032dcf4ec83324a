"""Double-slit geometry and the symmetrised two-particle plane-wave state.

Coordinates: ``x`` is transverse (along the slit plane and the screen), ``y``
is longitudinal. Slit A sits at ``x = +a/2`` and slit B at ``x = -a/2``; each
slit's wave is tilted toward the opposite half-plane so the two overlap in
the far-field region between ``launch_y`` and the screen.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels


class Statistics(enum.Enum):
    BOSE = "bose"
    MB = "mb"


class GeometryError(ValueError):
    pass


class NodeError(ArithmeticError):
    """Raised when a velocity is requested where the density vanishes."""


@dataclass(frozen=True)
class SlitGeometry:
    wavelength: float
    slit_separation: float
    slit_width: float
    screen_distance: float
    launch_y: float | None = None

    def __post_init__(self):
        for name in ("wavelength", "slit_separation", "slit_width", "screen_distance"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise GeometryError(f"{name} must be a positive finite length, got {value!r}")
        if self.launch_y is None:
            object.__setattr__(self, "launch_y", 0.5 * self.screen_distance)
        if not (0 <= self.launch_y < self.screen_distance):
            raise GeometryError(
                f"launch_y must satisfy 0 <= launch_y < screen_distance, got {self.launch_y!r}"
            )
        if self.slit_width < 10 * self.wavelength:
            warnings.warn(
                f"slit_width {self.slit_width} is not much larger than the wavelength "
                f"{self.wavelength}; the plane-wave far-field model is questionable",
                stacklevel=3,
            )

    @property
    def half_angle(self) -> float:
        return math.atan(self.slit_separation / (2.0 * self.screen_distance))


@dataclass(frozen=True)
class WaveVectors:
    kA: np.ndarray
    kB: np.ndarray
    K: np.ndarray = field(init=False)
    k: np.ndarray = field(init=False)

    def __post_init__(self):
        kA = np.asarray(self.kA, dtype=float)
        kB = np.asarray(self.kB, dtype=float)
        kA.setflags(write=False)
        kB.setflags(write=False)
        object.__setattr__(self, "kA", kA)
        object.__setattr__(self, "kB", kB)
        K = kA + kB
        k = kA - kB
        K.setflags(write=False)
        k.setflags(write=False)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "k", k)

        na, nb = np.hypot(*kA), np.hypot(*kB)
        if abs(na - nb) > 1e-12 * max(na, nb):
            raise GeometryError(f"|kA| = {na} and |kB| = {nb} differ")
        if abs(K[0]) > 1e-12 * na or abs(k[1]) > 1e-12 * na:
            raise GeometryError("wave vectors must satisfy K_x = 0 and k_y = 0")
        if not K[1] > 0:
            raise GeometryError("K_y must be positive (propagation toward the screen)")

    @property
    def wavenumber(self) -> float:
        return float(np.hypot(*self.kA))


def make_wave_vectors(geom: SlitGeometry) -> WaveVectors:
    theta = geom.half_angle
    kmag = 2.0 * math.pi / geom.wavelength
    kx = kmag * math.sin(theta)
    ky = kmag * math.cos(theta)
    return WaveVectors(kA=np.array([-kx, ky]), kB=np.array([kx, ky]))


def fringe_spacing(v: WaveVectors) -> float:
    """Period of the joint density in ``x1 - x2``: ``2 pi / |k_x|``.

    The symmetrised state factors as ``e^{iK.R} cos(k.r / 2)``, so the density
    goes as ``1 + cos(k_x (x1 - x2))``. For small slit angles this is
    ``lambda / (2 theta)``.
    """
    kx = abs(float(v.k[0]))
    if kx == 0.0:
        raise GeometryError("no transverse relative momentum; fringe spacing undefined")
    return 2.0 * math.pi / kx


@dataclass(frozen=True)
class WaveParams:
    vectors: WaveVectors
    statistics: Statistics = Statistics.BOSE
    envelope_sigma: float = math.inf
    hbar: float = 1.0
    mass: float = 1.0
    norm_scale: float = 1.0

    def __post_init__(self):
        if not isinstance(self.statistics, Statistics):
            object.__setattr__(self, "statistics", Statistics(self.statistics))
        if not self.envelope_sigma > 0:
            raise ValueError("envelope_sigma must be positive or inf")
        for name in ("hbar", "mass", "norm_scale"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite")

    @property
    def bose(self) -> bool:
        return self.statistics is Statistics.BOSE

    @property
    def energy(self) -> float:
        kA, kB = self.vectors.kA, self.vectors.kB
        return self.hbar**2 * (kA @ kA + kB @ kB) / (2.0 * self.mass)

    @property
    def fringe_spacing(self) -> float:
        return fringe_spacing(self.vectors)

    def field_array(self) -> np.ndarray:
        """Flat parameter vector consumed by :mod:`pairslit.kernels`."""
        f = np.empty(kernels.FIELD_SIZE)
        f[kernels.FIELD_KAX], f[kernels.FIELD_KAY] = self.vectors.kA
        f[kernels.FIELD_KBX], f[kernels.FIELD_KBY] = self.vectors.kB
        f[kernels.FIELD_HBAR_M] = self.hbar / self.mass
        f[kernels.FIELD_BOSE] = 1.0 if self.bose else 0.0
        f[kernels.FIELD_SIGMA] = self.envelope_sigma
        f[kernels.FIELD_NORM] = self.norm_scale
        return f

    def density_bound(self) -> float:
        """Upper bound of the density anywhere on the screen line."""
        return (4.0 if self.bose else 1.0) * self.norm_scale


def envelope(p: WaveParams, x):
    """Single-particle transverse factor ``exp(-x^2 / (4 sigma^2))``; 1 for infinite sigma."""
    if math.isinf(p.envelope_sigma):
        return np.ones_like(np.asarray(x, dtype=float))[()]
    x = np.asarray(x, dtype=float)
    return np.exp(-(x * x) / (4.0 * p.envelope_sigma**2))[()]


def psi(p: WaveParams, r1, r2, t: float = 0.0) -> complex:
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    kA, kB = p.vectors.kA, p.vectors.kB
    amp = math.sqrt(p.norm_scale) * envelope(p, r1[..., 0]) * envelope(p, r2[..., 0])
    terms = np.exp(1j * (r1 @ kA + r2 @ kB))
    if p.bose:
        terms = terms + np.exp(1j * (r2 @ kA + r1 @ kB))
    return (amp * terms * np.exp(-1j * p.energy * t / p.hbar))[()]


def psi_factored(p: WaveParams, r1, r2, t: float = 0.0) -> complex:
    """Bose state written in centre-of-mass and relative coordinates."""
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    R = 0.5 * (r1 + r2)
    r = r1 - r2
    amp = math.sqrt(p.norm_scale) * envelope(p, r1[..., 0]) * envelope(p, r2[..., 0])
    out = 2.0 * amp * np.exp(1j * (R @ p.vectors.K)) * np.cos(0.5 * (r @ p.vectors.k))
    return (out * np.exp(-1j * p.energy * t / p.hbar))[()]


def density(p: WaveParams, x1, x2):
    """``|psi|^2`` on a screen-parallel line (independent of the common y)."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    g2 = (envelope(p, x1) * envelope(p, x2)) ** 2
    if p.bose:
        kx = float(p.vectors.k[0])
        return (2.0 * g2 * p.norm_scale * (1.0 + np.cos(kx * (x1 - x2))))[()]
    return (g2 * p.norm_scale * np.ones_like(x1 - x2))[()]


def velocity(p: WaveParams, r1, r2, t: float = 0.0):
    """Guidance velocities ``(v1, v2)`` from the probability currents.

    ``t`` only enters the global phase and has no effect. Raises
    :class:`NodeError` where the density is at a node.
    """
    del t
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    v1x, v1y, v2x, v2y, node = kernels._velocity(r1[..., 0], r1[..., 1], r2[..., 0], r2[..., 1],
                                                 p.field_array())
    if np.any(node):
        raise NodeError("velocity undefined at a node of the wavefunction")
    return np.stack([v1x, v1y], axis=-1), np.stack([v2x, v2y], axis=-1)


def longitudinal_speed(p: WaveParams) -> float:
    """Slowest forward speed of either particle (both equal in this geometry)."""
    hm = p.hbar / p.mass
    if p.bose:
        return 0.5 * hm * float(p.vectors.K[1])
    return hm * min(float(p.vectors.kA[1]), float(p.vectors.kB[1]))
