"""Baseline polar format algorithm with two-pass windowed-sinc resampling.

The polar wavenumber samples are rotated into the frame of the
frame-centre azimuth, resampled first along range (each pulse), then along
azimuth (each range wavenumber column), onto a rectangle inscribed in the
polar annulus, and finally transformed with a zero-padded 2-D FFT.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dsp
from .echo import PhaseHistory, RvpState, remove_rvp
from .geometry import fast_time_axis, frame_pulse_angles, radial_wavenumber
from .image import ComplexImage

__all__ = ["RangeResampled", "RectGrid", "range_resample", "azimuth_resample", "focus_interp"]


@dataclass(frozen=True)
class RangeResampled:
    """Pass-1 output: pulses on a common projected range-wavenumber grid."""

    data: np.ndarray  # [n_pulses, n_kx]
    k_x: np.ndarray
    mask: np.ndarray  # True inside the polar support
    rel_theta: np.ndarray  # theta_n - theta_k per pulse
    d_theta: float


@dataclass(frozen=True)
class RectGrid:
    """Rectangular wavenumber grid ``[n_ky, n_kx]`` ready for the 2-D FFT."""

    data: np.ndarray
    k_x: np.ndarray
    k_y: np.ndarray
    mask: np.ndarray

    @property
    def dk_x(self) -> float:
        return float(self.k_x[1] - self.k_x[0])

    @property
    def dk_y(self) -> float:
        return float(self.k_y[1] - self.k_y[0])


def range_resample(ph: PhaseHistory, taps: int = 8, kaiser_beta: float = 4.0) -> RangeResampled:
    """Resample every pulse so that ``K_R cos(theta_n - theta_k)`` is uniform."""
    if ph.rvp_state is not RvpState.REMOVED:
        raise ValueError("range_resample needs an RVP-free phase history; deskew it first")
    p, g = ph.params, ph.geom
    k_r = radial_wavenumber(p, g, fast_time_axis(p))
    rel = frame_pulse_angles(g) - g.theta_k
    cos_rel = np.cos(rel)

    lo = k_r[0]
    hi = k_r[-1] * cos_rel.min()
    if hi <= lo:
        raise ValueError("aperture too wide for the range band: the inscribed rectangle is empty")
    k_x = np.linspace(lo, hi, p.n_fast)
    dk_r = k_r[1] - k_r[0]

    radial_needed = k_x[None, :] / cos_rel[:, None]
    with dsp.timed_stage("range_interp"):
        data, outside = dsp.sinc_interp(ph.data, radial_needed, taps, kaiser_beta, x0=k_r[0], dx=dk_r)
    return RangeResampled(data, k_x, ~outside, rel, g.d_theta)


def azimuth_resample(rr: RangeResampled, taps: int = 8, kaiser_beta: float = 4.0) -> RectGrid:
    """Resample each range-wavenumber column onto a uniform ``K_Y`` grid."""
    n_pulses = rr.data.shape[0]
    tan_max = math.tan(rr.rel_theta[-1])
    ky_max = rr.k_x[0] * tan_max
    k_y = np.linspace(-ky_max, ky_max, n_pulses)

    # fractional pulse index where k_x tan(rel) hits each target k_y
    angle = np.arctan(k_y[None, :] / rr.k_x[:, None])
    pulse_pos = (angle - rr.rel_theta[0]) / rr.d_theta
    with dsp.timed_stage("azimuth_interp"):
        cols, outside = dsp.sinc_interp(rr.data.T, pulse_pos, taps, kaiser_beta)
    data = cols.T
    mask = ~outside.T
    data[~mask] = 0.0
    return RectGrid(data, rr.k_x, k_y, mask)


def focus_interp(ph: PhaseHistory, out_rows: int = 1024, out_cols: int = 2048, *, taps: int = 8,
                 kaiser_beta: float = 4.0) -> ComplexImage:
    """Form an image with the interpolating polar format algorithm.

    Raw histories are deskewed (RVP removed) before resampling.
    """
    ph = remove_rvp(ph)
    if out_rows < ph.geom.n_pulses or out_cols < ph.params.n_fast:
        raise ValueError(
            f"output {out_rows}x{out_cols} is smaller than the {ph.geom.n_pulses}x{ph.params.n_fast} grid")
    grid = azimuth_resample(range_resample(ph, taps, kaiser_beta), taps, kaiser_beta)
    with dsp.timed_stage("fft2"):
        img = dsp.fft_axis(grid.data, "cols", n=out_cols)
        img = dsp.fft_axis(img, "rows", n=out_rows)
        img = dsp.fftshift_axis(dsp.fftshift_axis(img, "rows"), "cols")
    dx = 2 * math.pi / (out_cols * grid.dk_x)
    dy = 2 * math.pi / (out_rows * grid.dk_y)
    return ComplexImage(img, dx, dy, ph.geom.theta_k)
