"""Dechirped point-target phase histories for one sub-aperture frame."""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from . import dsp
from .geometry import (
    FrameGeometry,
    PointTarget,
    RadarParams,
    Scene,
    SceneError,
    delta_range_exact,
    delta_range_planar,
    fast_time_axis,
    frame_pulse_angles,
)

__all__ = ["RvpState", "PhaseHistory", "simulate", "remove_rvp", "rvp_filter"]


class RvpState(enum.IntEnum):
    RAW = 0
    REMOVED = 1

    @classmethod
    def parse(cls, value) -> "RvpState":
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            key = value.lower()
            if key == "raw":
                return cls.RAW
            if key in ("removed", "rvp_free"):
                return cls.REMOVED
            raise ValueError(f"unknown RVP state {value!r}")
        return cls(int(value))


@dataclass(frozen=True)
class PhaseHistory:
    """Complex samples ``[n_pulses, n_fast]`` plus their axes and provenance."""

    data: np.ndarray
    params: RadarParams
    geom: FrameGeometry
    rvp_state: RvpState

    def __post_init__(self):
        data = dsp.as_complex_matrix(self.data)
        shape = (self.geom.n_pulses, self.params.n_fast)
        if data.shape != shape:
            raise ValueError(f"phase history shape {data.shape} does not match axes {shape}")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "rvp_state", RvpState.parse(self.rvp_state))

    @property
    def tau_hat(self) -> np.ndarray:
        return fast_time_axis(self.params)

    @property
    def theta(self) -> np.ndarray:
        return frame_pulse_angles(self.geom)

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def with_data(self, data: np.ndarray, rvp_state=None) -> "PhaseHistory":
        return replace(self, data=data, rvp_state=self.rvp_state if rvp_state is None else rvp_state)


def _targets(scene) -> tuple[tuple[PointTarget, ...], float | None]:
    if isinstance(scene, Scene):
        return scene.targets, scene.radius_limit
    return tuple(scene), None


def simulate(scene: Scene | Iterable[PointTarget], p: RadarParams, g: FrameGeometry,
             mode: str | RvpState = "rvp_free", *, radius_limit: float | None = None,
             snr_db: float | None = None, rng: np.random.Generator | None = None,
             planar: bool = False) -> PhaseHistory:
    """Simulate the dechirped echo of a point-target scene.

    Each target contributes
    ``sigma * rect((tau_hat - dt)/T_r) * exp(-j 4 pi/c (f_c + K tau_hat) dR)``
    per pulse, with ``dR`` the exact differential range and ``dt = 2 dR / c``.
    ``mode="raw"`` multiplies in the residual video phase
    ``exp(+j 4 pi K dR^2 / c^2)``.

    Parameters
    ----------
    radius_limit : float, optional
        Scene-radius guard; defaults to the scene's own limit, or 50 m for
        a bare target list.
    snr_db : float, optional
        Adds circular white Gaussian noise at this per-sample SNR relative
        to the mean signal power.  Requires ``rng``.
    planar : bool
        Use the plane-wave differential range instead of the exact one.
        Only meant for tests that need a focuser-matched truth.
    """
    state = RvpState.parse(mode)
    targets, scene_limit = _targets(scene)
    limit = radius_limit if radius_limit is not None else (scene_limit or 50.0)
    for i, t in enumerate(targets):
        if t.radius > limit:
            raise SceneError(i, t.radius, limit)

    tau = fast_time_axis(p)
    theta = frame_pulse_angles(g)
    k = p.chirp_rate
    out = np.zeros((g.n_pulses, p.n_fast), dtype=np.complex128)
    range_fn = delta_range_planar if planar else delta_range_exact
    for t in targets:
        dr = range_fn(g, t, theta)[:, None]
        phase = -4 * np.pi / p.c * (p.f_c + k * tau[None, :]) * dr
        if state is RvpState.RAW:
            phase = phase + 4 * np.pi * k * dr ** 2 / p.c ** 2
        envelope = np.abs(tau[None, :] - 2 * dr / p.c) <= p.pulse_width / 2
        out += t.sigma * envelope * np.exp(1j * phase)

    if snr_db is not None:
        if rng is None:
            raise ValueError("noise requires an explicit random generator")
        power = np.mean(np.abs(out) ** 2) if targets else 1.0
        sd = np.sqrt(power / 10 ** (snr_db / 10) / 2)
        out += sd * (rng.standard_normal(out.shape) + 1j * rng.standard_normal(out.shape))
    return PhaseHistory(out, p, g, state)


def rvp_filter(p: RadarParams, n: int | None = None) -> np.ndarray:
    """Range-frequency filter that removes the residual video phase.

    A beat tone at ``f`` carries ``exp(+j pi f^2 / K)`` of RVP; this filter
    is its conjugate, on the ``fftfreq`` grid of length ``n``.
    """
    n = p.n_fast if n is None else n
    f = np.fft.fftfreq(n, 1.0 / p.f_s)
    return np.exp(-1j * np.pi * f ** 2 / p.chirp_rate)


def remove_rvp(ph: PhaseHistory) -> PhaseHistory:
    """Deskew a raw history; a no-op for histories that are already RVP-free."""
    if ph.rvp_state is RvpState.REMOVED:
        return ph
    spec = dsp.fft_axis(ph.data, "cols")
    spec = dsp.apply_stage(spec, rvp_filter(ph.params)[None, :])
    return ph.with_data(dsp.fft_axis(spec, "cols", inverse=True), RvpState.REMOVED)
