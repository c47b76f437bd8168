"""Independent reference evaluations used by the tests.

These are written directly from the signal model, without calling into the
focusers, so the focusers can be checked against them.
"""

import math

import numpy as np


def rvp_free_pulse(p, d_r, tau, deskewed=False):
    """Analytic RVP-free dechirped pulse for differential range ``d_r`` at fast times ``tau``.

    The envelope covers the sample cells occupied by the echo inside the
    fast-time window, with fractional weights for cells cut by the edges.
    ``deskewed`` moves that envelope by ``-2 d_r / c``, as RVP removal of a
    raw echo does.
    """
    n = p.n_fast
    grid = (np.arange(n) - n // 2) / p.f_s
    on = grid[np.abs(grid - 2 * d_r / p.c) <= p.pulse_width / 2]
    cell = 1.0 / p.f_s
    lo, hi = on[0] - cell / 2, on[-1] + cell / 2
    if deskewed:
        lo, hi = lo - 2 * d_r / p.c, hi - 2 * d_r / p.c
    w = np.clip(np.minimum(tau - lo, hi - tau) / cell + 0.5, 0.0, 1.0)
    return w * np.exp(-1j * 4 * np.pi / p.c * (p.f_c + p.chirp_rate * tau) * d_r)


def range_scaled_pulse(p, d_r, delta, tau, deskewed=True):
    """``sqrt(delta) * s_R(delta * tau + (delta - 1) f_c / K)`` on the axis ``tau``."""
    arg = delta * tau + (delta - 1) * p.f_c / p.chirp_rate
    return math.sqrt(delta) * rvp_free_pulse(p, d_r, arg, deskewed)


def azimuth_scaled_spectrum(column_fn, delta, n_pulses, prf, n_out, pad=48):
    """Unitary length-``n_out`` DFT of ``column_fn(delta * t)`` over the scaled aperture.

    ``column_fn`` gives the azimuth signal at slow time ``t`` (zero at the
    aperture centre).  The aperture is ``|delta * t| <= n_pulses/(2 prf)``
    with fractional edge-cell weights; frequencies follow ``fftfreq`` order.
    """
    t = (np.arange(-pad, n_pulses + pad) - (n_pulses - 1) / 2) / prf
    half = n_pulses / (2 * prf)
    w = np.clip((half - np.abs(delta * t)) / (delta / prf) + 0.5, 0.0, 1.0)
    s = column_fn(delta * t) * w
    f = np.fft.fftfreq(n_out, 1.0 / prf)
    return math.sqrt(delta) * (np.exp(-2j * np.pi * np.outer(f, t)) @ s) / math.sqrt(n_out)


def rms_db(actual, expected):
    """Relative RMS error in dB."""
    return 20 * math.log10(np.linalg.norm(actual - expected) / np.linalg.norm(expected))


def sinc_image(n_support, n_image, shift=(0.0, 0.0)):
    """Image of a flat ``n_support``-square spectrum zero-padded to ``n_image``, peak moved by ``shift`` px."""
    k = np.arange(n_support) - (n_support - 1) / 2
    rows = np.exp(-2j * np.pi * np.outer(np.arange(n_image) - n_image // 2 - shift[0], k) / n_image)
    cols = np.exp(-2j * np.pi * np.outer(k, np.arange(n_image) - n_image // 2 - shift[1]) / n_image)
    return rows @ np.ones((n_support, n_support)) @ cols / n_image


def deskew_padded(pulse, p, total, left):
    """RVP removal of one raw pulse placed at ``left`` in a zero buffer of length ``total``."""
    x = np.zeros(total, dtype=np.complex128)
    x[left:left + pulse.size] = pulse
    f = np.fft.fftfreq(total, 1.0 / p.f_s)
    return np.fft.ifft(np.fft.fft(x) * np.exp(-1j * np.pi * f ** 2 / p.chirp_rate))


def bandlimited_at(x, f_s, t0, query):
    """Trigonometric interpolant of samples ``x`` (first sample at ``t0``) at times ``query``."""
    n = x.size
    f = np.fft.fftfreq(n, 1.0 / f_s)
    spec = np.fft.fft(x)
    return np.exp(2j * np.pi * np.outer(np.asarray(query) - t0, f)) @ spec / n
