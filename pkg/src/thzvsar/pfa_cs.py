"""Interpolation-free polar reformatting by two-stage chirp scaling.

Pipeline (every step is an FFT or an elementwise complex multiply):

* range, per pulse ``n`` with ``d = 1/cos(theta_n - theta_k)``::

      FFT -> H1 -> IFFT -> PhiS(tau) -> FFT -> H2(f) -> IFFT -> PhiI(tau)

  maps each pulse to ``s(d*tau + (d-1) f_c/K)``, so that every pulse has
  the same projected range wavenumber grid.
* azimuth, per range bin ``m`` with ``d = f_c/(f_c + K tau_m)``::

      h1(t) -> FFT -> PhiS(f) -> IFFT -> h2(t) -> FFT -> PhiI(f)

  yields the azimuth spectrum of ``s(tau_m, d*t)``, i.e. a uniform and
  bin-independent azimuth wavenumber grid, already focused in azimuth.
* a final zero-padded range FFT forms the image.

Sign conventions follow ``numpy``'s forward kernel ``exp(-j 2 pi f t)``.
The range chain as a whole carries one ``exp(-j pi f^2/K)`` of dispersion,
which is exactly the residual-video-phase (RVP) removal; ``H1`` therefore
re-chirps an RVP-free input and is skipped for raw input.  ``h2`` enters
conjugated so that ``h1*h2 = 1`` when ``d = 1``.

Both chains run on a zero-padded axis so the dispersive stages convolve
linearly instead of wrapping around the window edges.  The padding is kept
in the outputs, which keeps the whole pipeline exactly energy preserving.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft

from . import dsp
from .echo import PhaseHistory, RvpState
from .geometry import FrameGeometry, RadarParams, fast_time_axis, frame_pulse_angles, radial_wavenumber
from .image import ComplexImage

__all__ = [
    "ChirpScalingError",
    "ScalingFactors",
    "RangeScaled",
    "AzimuthSpectrum",
    "scaling_factors",
    "range_chirp_scaling",
    "azimuth_chirp_scaling",
    "focus_cs",
    "DEFAULT_SUPPORT_RADIUS",
]

DEFAULT_SUPPORT_RADIUS = 40.0
_EDGE_MARGIN = 8


class ChirpScalingError(ValueError):
    """Scaled signal support would alias; ``index`` names the pulse or range bin."""

    def __init__(self, message: str, index: int):
        self.index = index
        super().__init__(message)


@dataclass(frozen=True)
class ScalingFactors:
    delta_r: np.ndarray  # per pulse
    delta_a: np.ndarray  # per fast-time bin
    k_a: float  # azimuth Doppler rate at aperture centre, Hz/s
    alpha: float  # -pi*K

    def __post_init__(self):
        object.__setattr__(self, "delta_r", np.asarray(self.delta_r, dtype=float))
        object.__setattr__(self, "delta_a", np.asarray(self.delta_a, dtype=float))


def scaling_factors(p: RadarParams, g: FrameGeometry) -> ScalingFactors:
    theta = frame_pulse_angles(g)
    tau = fast_time_axis(p)
    k_a = -2 * g.speed ** 2 / (p.wavelength * g.slant_range)
    return ScalingFactors(
        delta_r=1.0 / np.cos(theta - g.theta_k),
        delta_a=p.f_c / (p.f_c + p.chirp_rate * tau),
        k_a=k_a,
        alpha=-math.pi * p.chirp_rate,
    )


@dataclass(frozen=True)
class RangeScaled:
    """Range-scaled, RVP-free samples on a zero-padded fast-time axis.

    ``data[:, pad_left:pad_left + n_fast]`` covers the original window.
    """

    data: np.ndarray
    tau_hat: np.ndarray
    pad_left: int
    source: PhaseHistory

    @property
    def window(self) -> np.ndarray:
        n = self.source.params.n_fast
        return self.data[:, self.pad_left:self.pad_left + n]


@dataclass(frozen=True)
class AzimuthSpectrum:
    """Azimuth spectrum ``[n_freq, n_range]`` referenced to the aperture centre.

    Rows follow ``fftfreq(n_freq, 1/PRF)`` order.
    """

    data: np.ndarray
    freq: np.ndarray
    range_scaled: RangeScaled


def _padded_length(n: int, margin: int) -> tuple[int, int]:
    total = scipy.fft.next_fast_len(n + 2 * margin)
    left = (total - n) // 2
    return total, left


def _range_margin(p: RadarParams, sf: ScalingFactors) -> int:
    # group delay of the quadratic range filters, plus the shift and stretch
    # of the scaled pulse, in samples
    d = sf.delta_r
    shift = np.max(np.abs(d - 1) / d) * p.f_c / p.chirp_rate * p.f_s
    stretch = np.max(np.abs(1 / d - 1)) * p.n_fast / 2
    return int(math.ceil(p.f_s ** 2 / (2 * p.chirp_rate) + shift + stretch)) + _EDGE_MARGIN


def range_stage_functions(p: RadarParams, g: FrameGeometry, sf: ScalingFactors, tau: np.ndarray):
    """Stage multipliers of the range chain on the (padded) axis ``tau``.

    Returns ``(H1, PhiS, H2, PhiI)``; ``H1`` is 1-D over frequency, the
    others are ``[n_pulses, len(tau)]``.
    """
    k = p.chirp_rate
    f = np.fft.fftfreq(tau.size, 1.0 / p.f_s)
    d = sf.delta_r[:, None]
    shift = (d - 1) * p.f_c / (d * k)
    h1 = np.exp(1j * math.pi * f ** 2 / k)
    phi_s = np.exp(1j * math.pi * k * (1 - d) * tau[None, :] ** 2)
    h2 = np.exp(-1j * math.pi * f[None, :] ** 2 / (d * k)) * np.exp(2j * math.pi * f[None, :] * shift)
    phi_i = np.exp(1j * math.pi * k * d * (d - 1) * (tau[None, :] + shift) ** 2)
    return h1, phi_s, h2, phi_i


def _check_range_support(p: RadarParams, g: FrameGeometry, sf: ScalingFactors, radius: float) -> None:
    d = sf.delta_r
    f_max = 2 * p.chirp_rate * radius * math.cos(g.grazing) / p.c
    over = np.nonzero(d * f_max > p.f_s / 2)[0]
    if over.size:
        i = int(over[0])
        raise ChirpScalingError(
            f"pulse {i}: range scaling by {d[i]:.6f} pushes the "
            f"{radius:g} m scene beyond the fast-time Nyquist band", i)
    # the scaled pulse centre moves by (d-1)/d f_c/K; past half the window
    # the pulse has no overlap with the frame-centre band left
    shift = np.abs(d - 1) / d * p.f_c / p.chirp_rate
    over = np.nonzero(shift > p.pulse_width / 2)[0]
    if over.size:
        i = int(over[0])
        raise ChirpScalingError(
            f"pulse {i}: range scaling by {d[i]:.6f} moves the pulse {shift[i] * 1e6:.3g} us, "
            f"beyond half the {p.pulse_width * 1e6:g} us window (aperture too wide)", i)


def range_chirp_scaling(ph: PhaseHistory, sf: ScalingFactors | None = None, *,
                        support_radius: float = DEFAULT_SUPPORT_RADIUS,
                        allow_rvp_free: bool = False, keep_stages: bool = False):
    """Per-pulse range frequency scaling.

    Expects a raw history and always returns RVP-free output: the chain's
    net dispersion is the RVP removal filter, so ``H1`` is not needed for
    raw input.  RVP-free input is rejected unless ``allow_rvp_free``, in
    which case ``H1`` re-applies the dispersion first.  With
    ``keep_stages`` the intermediate signals ``p1..p4`` (padded) are
    returned alongside the result.
    """
    if ph.rvp_state is RvpState.REMOVED and not allow_rvp_free:
        raise ValueError("range_chirp_scaling expects a raw history; pass allow_rvp_free=True "
                         "for RVP-free input")
    p, g = ph.params, ph.geom
    sf = scaling_factors(p, g) if sf is None else sf
    _check_range_support(p, g, sf, support_radius)

    n = p.n_fast
    total, left = _padded_length(n, _range_margin(p, sf))
    tau = fast_time_axis(p)[0] + (np.arange(total) - left) / p.f_s
    h1, phi_s, h2, phi_i = range_stage_functions(p, g, sf, tau)

    stages = {}
    with dsp.timed_stage("range_scaling"):
        x = np.zeros((g.n_pulses, total), dtype=np.complex128)
        x[:, left:left + n] = ph.data
        if ph.rvp_state is RvpState.REMOVED:
            x = dsp.fft_axis(x, "cols")
            x = dsp.apply_stage(x, h1[None, :])
            x = dsp.fft_axis(x, "cols", inverse=True)
        stages["p1"] = x
        x = dsp.apply_stage(x, phi_s)
        stages["p2"] = x
        x = dsp.fft_axis(x, "cols")
        x = dsp.apply_stage(x, h2)
        x = dsp.fft_axis(x, "cols", inverse=True)
        stages["p3"] = x
        x = dsp.apply_stage(x, phi_i)
        stages["p4"] = x
    result = RangeScaled(x, tau, left, ph)
    return (result, stages) if keep_stages else result


def _azimuth_margin(p: RadarParams, sf: ScalingFactors) -> int:
    # group delay of PhiS at the band edge, in pulses
    d = sf.delta_a
    delay = np.max(np.abs(d - 1) / (d * abs(sf.k_a))) * p.prf / 2
    return int(math.ceil(delay * p.prf)) + _EDGE_MARGIN


def _check_azimuth_support(p: RadarParams, g: FrameGeometry, delta_a: np.ndarray, k_a: float,
                           tau: np.ndarray, t_half: float, radius: float) -> None:
    omega = g.d_theta * p.prf
    k_r = radial_wavenumber(p, g, tau)
    band = k_r * omega * radius / (2 * math.pi) * np.maximum(1.0, delta_a) + abs(k_a) * t_half
    over = np.nonzero(band > p.prf / 2)[0]
    if over.size:
        i = int(over[0])
        raise ChirpScalingError(
            f"range bin {i}: azimuth scaling by {delta_a[i]:.6f} needs "
            f"{band[i]:.1f} Hz of Doppler support, beyond PRF/2 = {p.prf / 2:g} Hz", i)


def azimuth_stage_functions(p: RadarParams, sf_delta_a: np.ndarray, k_a: float, t: np.ndarray,
                            n_out: int):
    """Stage multipliers ``(h1, PhiS, h2, PhiI)`` of the azimuth chain.

    ``t`` is the padded slow-time axis (zero at aperture centre); ``PhiI``
    also carries the linear phase that references the output spectrum to
    ``t = 0`` instead of the first buffer sample.
    """
    d = sf_delta_a[None, :]
    f_mid = np.fft.fftfreq(t.size, 1.0 / p.prf)[:, None]
    f_out = np.fft.fftfreq(n_out, 1.0 / p.prf)[:, None]
    h1 = np.exp(1j * math.pi * k_a * t ** 2)[:, None]
    phi_s = np.exp(1j * math.pi * (d - 1) * f_mid ** 2 / (d * k_a))
    h2 = np.exp(-1j * math.pi * d * k_a * t[:, None] ** 2)
    phi_i = np.exp(-1j * math.pi * (d - 1) * f_out ** 2 / (d ** 2 * k_a)) * np.exp(-2j * math.pi * f_out * t[0])
    return h1, phi_s, h2, phi_i


def azimuth_chirp_scaling(rs: RangeScaled, sf: ScalingFactors | None = None, n_out: int | None = None,
                          *, support_radius: float = DEFAULT_SUPPORT_RADIUS) -> AzimuthSpectrum:
    """Per-range-bin azimuth time scaling; returns the focused azimuth spectrum.

    The scaling factor of each padded range sample follows from its own
    fast time, so padding columns are scaled consistently with the window.
    """
    ph = rs.source
    p, g = ph.params, ph.geom
    sf = scaling_factors(p, g) if sf is None else sf
    if sf.delta_a.shape != (p.n_fast,):
        raise ValueError("delta_a must have one entry per fast-time sample")
    geometric = p.f_c / (p.f_c + p.chirp_rate * rs.tau_hat)
    window = slice(rs.pad_left, rs.pad_left + p.n_fast)
    if np.allclose(sf.delta_a, geometric[window], rtol=1e-13, atol=0):
        delta_a = geometric
    else:
        # overridden factors: hold the edge values across the padding
        delta_a = np.pad(sf.delta_a, (rs.pad_left, rs.tau_hat.size - p.n_fast - rs.pad_left), mode="edge")

    n_p = g.n_pulses
    t_half = n_p / (2 * p.prf)
    _check_azimuth_support(p, g, delta_a, sf.k_a, rs.tau_hat, t_half, support_radius)
    total, top = _padded_length(n_p, _azimuth_margin(p, sf))
    n_out = total if n_out is None else n_out
    if n_out < total:
        raise ValueError(f"azimuth output length {n_out} is shorter than the padded aperture {total}")
    t = -(n_p - 1) / (2 * p.prf) + (np.arange(total) - top) / p.prf
    h1, phi_s, h2, phi_i = azimuth_stage_functions(p, delta_a, sf.k_a, t, n_out)

    with dsp.timed_stage("azimuth_scaling"):
        x = np.zeros((total, rs.data.shape[1]), dtype=np.complex128)
        x[top:top + n_p] = rs.data
        x = dsp.apply_stage(x, h1)
        x = dsp.fft_axis(x, "rows")
        x = dsp.apply_stage(x, phi_s)
        x = dsp.fft_axis(x, "rows", inverse=True)
        x = dsp.apply_stage(x, h2)
        x = dsp.fft_axis(x, "rows", n=n_out)
        x = dsp.apply_stage(x, phi_i)
    return AzimuthSpectrum(x, np.fft.fftfreq(n_out, 1.0 / p.prf), rs)


def cs_pixel_spacing(p: RadarParams, g: FrameGeometry, out_rows: int, out_cols: int) -> tuple[float, float]:
    dk_x = 4 * math.pi / p.c * p.chirp_rate * math.cos(g.grazing) / p.f_s
    dk_y = float(radial_wavenumber(p, g, 0.0)) * g.d_theta
    return 2 * math.pi / (out_cols * dk_x), 2 * math.pi / (out_rows * dk_y)


def focus_cs(ph: PhaseHistory, out_rows: int = 1024, out_cols: int = 2048, *,
             support_radius: float = DEFAULT_SUPPORT_RADIUS,
             factors: ScalingFactors | None = None, allow_rvp_free: bool = False) -> ComplexImage:
    """Form an image with the chirp-scaling polar format algorithm.

    Expects a raw phase history (see :func:`range_chirp_scaling` for
    ``allow_rvp_free``).  ``factors`` overrides the geometric scaling
    factors (used to test degenerate configurations).
    """
    p, g = ph.params, ph.geom
    sf = scaling_factors(p, g) if factors is None else factors
    rs = range_chirp_scaling(ph, sf, support_radius=support_radius, allow_rvp_free=allow_rvp_free)
    if out_cols < rs.data.shape[1]:
        raise ValueError(f"out_cols={out_cols} is smaller than the padded range grid {rs.data.shape[1]}")
    az = azimuth_chirp_scaling(rs, sf, out_rows, support_radius=support_radius)
    with dsp.timed_stage("range_fft"):
        img = dsp.fft_axis(az.data, "cols", n=out_cols)
        img = dsp.fftshift_axis(dsp.fftshift_axis(img, "rows"), "cols")
    dx, dy = cs_pixel_spacing(p, g, out_rows, out_cols)
    return ComplexImage(img, dx, dy, g.theta_k)
