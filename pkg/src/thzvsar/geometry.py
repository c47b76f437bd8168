"""Circular video-SAR geometry and radar constants.

Fast-time convention: every formula uses ``tau_hat = tau - 2*R_a/c``, the
fast time relative to the scene-centre echo, sampled on
``[-T_r/2, T_r/2)`` at ``f_s``.  The azimuth angle ``theta`` is the
independent slow-time variable; slow time is ``t = R_s*(theta - theta_k)/v``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "C_EXACT",
    "RadarParams",
    "FrameGeometry",
    "PointTarget",
    "Scene",
    "SceneError",
    "apc_position",
    "delta_range_exact",
    "delta_range_planar",
    "wavenumber_coords",
    "radial_wavenumber",
    "frame_pulse_angles",
    "fast_time_axis",
    "slow_time_axis",
    "rotate_to_frame",
    "default_scene",
]

C_EXACT = 2.99792458e8


class SceneError(ValueError):
    """A point target violates the scene-radius guard."""

    def __init__(self, index: int, radius: float, limit: float):
        self.index = index
        self.radius = radius
        self.limit = limit
        super().__init__(
            f"target {index} lies {radius:.3f} m from scene centre, "
            f"beyond the scene radius limit of {limit:g} m"
        )


@dataclass(frozen=True)
class RadarParams:
    """LFM waveform and sampling constants (SI units)."""

    f_c: float
    bandwidth: float
    f_s: float
    pulse_width: float
    prf: float
    c: float = C_EXACT

    def __post_init__(self):
        for name in ("f_c", "bandwidth", "f_s", "pulse_width", "prf", "c"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"RadarParams.{name} must be positive and finite, got {value!r}")
        if self.n_fast < 16:
            raise ValueError(f"f_s * T_r must give at least 16 fast-time samples, got {self.n_fast}")

    @property
    def chirp_rate(self) -> float:
        return self.bandwidth / self.pulse_width

    @property
    def wavelength(self) -> float:
        return self.c / self.f_c

    @property
    def n_fast(self) -> int:
        return int(round(self.f_s * self.pulse_width))


@dataclass(frozen=True)
class FrameGeometry:
    """One sub-aperture of the circular trajectory.

    ``d_theta`` is the azimuth increment per pulse; use :meth:`circular`
    to derive it from platform speed and PRF.
    """

    slant_range: float
    grazing: float
    speed: float
    theta_k: float
    n_pulses: int
    d_theta: float

    def __post_init__(self):
        if not self.slant_range > 0:
            raise ValueError("slant_range must be positive")
        if not 0 <= self.grazing < math.pi / 2:
            raise ValueError("grazing angle must lie in [0, pi/2)")
        if not self.speed > 0:
            raise ValueError("platform speed must be positive")
        if self.n_pulses < 2:
            raise ValueError("a frame needs at least 2 pulses")
        if not self.d_theta > 0:
            raise ValueError("d_theta must be positive")
        if self.n_pulses * self.d_theta >= 0.1:
            raise ValueError(
                f"synthetic aperture {self.n_pulses * self.d_theta:.4g} rad is not below 0.1 rad"
            )

    @classmethod
    def circular(cls, radar: RadarParams, slant_range: float, grazing: float, speed: float,
                 theta_k: float, n_pulses: int) -> "FrameGeometry":
        radius = slant_range * math.cos(grazing)
        return cls(slant_range, grazing, speed, theta_k, n_pulses, speed / (radius * radar.prf))

    @property
    def track_radius(self) -> float:
        return self.slant_range * math.cos(self.grazing)

    @property
    def height(self) -> float:
        return self.slant_range * math.sin(self.grazing)

    @property
    def aperture(self) -> float:
        return self.n_pulses * self.d_theta

    def with_theta(self, theta_k: float) -> "FrameGeometry":
        return FrameGeometry(self.slant_range, self.grazing, self.speed, theta_k,
                             self.n_pulses, self.d_theta)


@dataclass(frozen=True)
class PointTarget:
    x: float
    y: float
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"target amplitude must be positive, got {self.sigma!r}")

    @property
    def radius(self) -> float:
        return math.hypot(self.x, self.y)


@dataclass(frozen=True)
class Scene:
    """Point targets on the ground plane, guarded by a maximum radius."""

    targets: tuple[PointTarget, ...] = field(default_factory=tuple)
    radius_limit: float = 50.0

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        self.check()

    def check(self) -> None:
        for i, t in enumerate(self.targets):
            if t.radius > self.radius_limit:
                raise SceneError(i, t.radius, self.radius_limit)

    def __len__(self) -> int:
        return len(self.targets)

    def __iter__(self):
        return iter(self.targets)


def default_scene(spacing: float = 20.0, radius_limit: float = 50.0) -> Scene:
    """3x3 grid of unit targets centred on the scene origin."""
    offsets = (-spacing, 0.0, spacing)
    return Scene(tuple(PointTarget(x, y) for y in offsets for x in offsets), radius_limit)


def apc_position(g: FrameGeometry, theta):
    """Antenna phase centre (x, y, z) in metres at azimuth ``theta``."""
    theta = np.asarray(theta, dtype=float)
    r = g.slant_range * math.cos(g.grazing)
    return r * np.cos(theta), r * np.sin(theta), np.full_like(theta, g.height)


def delta_range_exact(g: FrameGeometry, t: PointTarget, theta):
    """Range to the target minus the range to scene centre."""
    xa, ya, za = apc_position(g, theta)
    return np.sqrt((xa - t.x) ** 2 + (ya - t.y) ** 2 + za ** 2) - g.slant_range


def delta_range_planar(g: FrameGeometry, t: PointTarget, theta):
    """First-order (plane-wave) differential range."""
    theta = np.asarray(theta, dtype=float)
    cg = math.cos(g.grazing)
    return -(t.x * cg * np.cos(theta) + t.y * cg * np.sin(theta))


def radial_wavenumber(p: RadarParams, g: FrameGeometry, tau_hat):
    """Ground-projected radial wavenumber ``(4 pi / c)(f_c + K tau_hat) cos(phi)``."""
    tau_hat = np.asarray(tau_hat, dtype=float)
    return 4 * np.pi / p.c * (p.f_c + p.chirp_rate * tau_hat) * math.cos(g.grazing)


def wavenumber_coords(p: RadarParams, g: FrameGeometry, tau_hat, theta):
    """Polar-grid wavenumbers ``(K_X, K_Y)`` in rad/m; arguments broadcast."""
    kr = radial_wavenumber(p, g, tau_hat)
    theta = np.asarray(theta, dtype=float)
    return kr * np.cos(theta), kr * np.sin(theta)


def frame_pulse_angles(g: FrameGeometry) -> np.ndarray:
    """Pulse azimuths, symmetric about ``theta_k``."""
    n = np.arange(g.n_pulses)
    return g.theta_k + (n - (g.n_pulses - 1) / 2) * g.d_theta


def fast_time_axis(p: RadarParams) -> np.ndarray:
    """``tau_hat`` samples on ``[-T_r/2, T_r/2)`` with step ``1/f_s``."""
    n = p.n_fast
    return (np.arange(n) - n // 2) / p.f_s


def slow_time_axis(p: RadarParams, g: FrameGeometry) -> np.ndarray:
    """Slow time of each pulse, zero at the frame centre."""
    return (np.arange(g.n_pulses) - (g.n_pulses - 1) / 2) / p.prf


def rotate_to_frame(x, y, theta_k: float):
    """Ground coordinates to image-frame coordinates for frame azimuth ``theta_k``."""
    c, s = math.cos(theta_k), math.sin(theta_k)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return x * c + y * s, -x * s + y * c
