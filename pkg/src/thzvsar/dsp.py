"""Spectral primitives shared by the focusers.

All transforms are unitary (``1/sqrt(N)`` in both directions), so every
FFT preserves energy exactly up to rounding.  Matrices are plain 2-D
complex ``numpy`` arrays laid out as ``[pulses, fast-time samples]``.

Operation counting
------------------
Focusers report how many transform passes, elementwise multiply passes
and interpolation-kernel evaluations they perform.  Counting is scoped
with :func:`count_ops`, which uses a context variable so that concurrent
frames (threads) never see each other's counts.
"""

from __future__ import annotations

import contextlib
import contextvars
import time
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
import scipy.fft

__all__ = [
    "OpCounts",
    "count_ops",
    "as_complex_matrix",
    "fft_axis",
    "fftshift_axis",
    "centre_index",
    "apply_stage",
    "oversample_1d",
    "kaiser_sinc_weights",
    "sinc_interp",
]

ROWS = 0
COLS = 1
_AXES = {"rows": ROWS, "cols": COLS, 0: ROWS, 1: COLS}


@dataclass
class OpCounts:
    """Tally of the expensive operations performed inside a :func:`count_ops` block."""

    fft_passes: int = 0
    multiply_passes: int = 0
    interp_calls: int = 0
    interp_kernel_evals: int = 0
    stage_seconds: dict[str, float] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "fft_passes": self.fft_passes,
            "multiply_passes": self.multiply_passes,
            "interp_calls": self.interp_calls,
            "interp_kernel_evals": self.interp_kernel_evals,
            "stage_seconds": dict(self.stage_seconds),
        }


_COUNTS: contextvars.ContextVar[OpCounts | None] = contextvars.ContextVar(
    "thzvsar_op_counts", default=None
)


@contextlib.contextmanager
def count_ops() -> Iterator[OpCounts]:
    """Collect operation counts for everything executed in the ``with`` body."""
    counts = OpCounts()
    token = _COUNTS.set(counts)
    try:
        yield counts
    finally:
        _COUNTS.reset(token)


@contextlib.contextmanager
def timed_stage(name: str) -> Iterator[None]:
    """Accumulate wall time of a named pipeline stage into the active counter."""
    counts = _COUNTS.get()
    start = time.perf_counter()
    try:
        yield
    finally:
        if counts is not None:
            counts.stage_seconds[name] = (
                counts.stage_seconds.get(name, 0.0) + time.perf_counter() - start
            )


def _bump(attr: str, n: int = 1) -> None:
    counts = _COUNTS.get()
    if counts is not None:
        setattr(counts, attr, getattr(counts, attr) + n)


def as_complex_matrix(m) -> np.ndarray:
    """Validate and return ``m`` as a finite 2-D complex128 array."""
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    a = a.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains NaN or Inf samples")
    return a


def _axis(axis) -> int:
    try:
        return _AXES[axis]
    except KeyError:
        raise ValueError(f"axis must be 'rows' or 'cols', got {axis!r}") from None


def fft_axis(m: np.ndarray, axis="cols", inverse: bool = False, n: int | None = None) -> np.ndarray:
    """Unitary FFT of every line of ``m`` along one axis.

    ``axis="cols"`` transforms along the column index (each row, i.e. each
    pulse, is transformed: the range/fast-time FFT).  ``axis="rows"``
    transforms along the row index (each column: the azimuth FFT).
    ``n`` zero-pads (or truncates) the transformed axis; the ``1/sqrt(n)``
    normalisation keeps zero-padded transforms energy preserving.
    """
    ax = _axis(axis)
    a = np.asarray(m)
    _bump("fft_passes")
    if inverse:
        return scipy.fft.ifft(a, n=n, axis=ax, norm="ortho")
    return scipy.fft.fft(a, n=n, axis=ax, norm="ortho")


def fftshift_axis(m: np.ndarray, axis="cols") -> np.ndarray:
    """Circular shift by ``floor(N/2)`` along one axis (works on 1-D input too).

    ``out[i] = in[(i + N//2) mod N]``, so ``[0, 1, 2] -> [1, 2, 0]``.  For
    even ``N`` this is self-inverse and equals ``numpy.fft.fftshift``; for
    odd ``N`` bin 0 lands at index ``ceil(N/2)``.
    """
    a = np.asarray(m)
    ax = 0 if a.ndim == 1 else _axis(axis)
    return np.roll(a, -(a.shape[ax] // 2), axis=ax)


def centre_index(n: int) -> int:
    """Index where :func:`fftshift_axis` places bin 0 of a length-``n`` axis."""
    return (n - n // 2) % n


def apply_stage(m: np.ndarray, stage: np.ndarray) -> np.ndarray:
    """Elementwise multiply by a (broadcastable) stage function; counted as one pass."""
    _bump("multiply_passes")
    return m * stage


def oversample_1d(v, factor: int) -> np.ndarray:
    """Band-limited (spectral zero-padding) interpolation of a periodic sequence.

    Output sample ``k`` is the trigonometric interpolant at position
    ``k / factor``; the original samples reappear at stride ``factor``.
    For even lengths the Nyquist bin is split symmetrically so real input
    stays real.
    """
    if int(factor) != factor or factor < 1:
        raise ValueError(f"factor must be a positive integer, got {factor!r}")
    factor = int(factor)
    x = np.asarray(v, dtype=np.complex128)
    n = x.size
    if factor == 1 or n == 0:
        return x.copy()
    spec = scipy.fft.fft(x)
    big = np.zeros(n * factor, dtype=np.complex128)
    half = n // 2
    if n % 2:
        big[: half + 1] = spec[: half + 1]
        if half:
            big[-half:] = spec[half + 1:]
    else:
        big[:half] = spec[:half]
        if half > 1:
            big[-(half - 1):] = spec[half + 1:]
        big[half] = 0.5 * spec[half]
        big[-half] = 0.5 * spec[half]
    return scipy.fft.ifft(big) * factor


def kaiser_sinc_weights(offsets: np.ndarray, taps: int, beta: float) -> np.ndarray:
    """Truncated sinc times a Kaiser window spanning ``taps`` samples.

    ``offsets`` are distances (in samples) from the query point; weights
    are zero for ``|offset| >= taps / 2``.
    """
    u = np.asarray(offsets, dtype=float)
    half = taps / 2.0
    r = np.clip(1.0 - (u / half) ** 2, 0.0, None)
    w = np.sinc(u) * np.i0(beta * np.sqrt(r)) / np.i0(beta)
    return np.where(np.abs(u) < half, w, 0.0)


def sinc_interp(samples, query, taps: int = 8, kaiser_beta: float = 4.0, x0: float = 0.0,
                dx: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Windowed-sinc interpolation of uniformly spaced samples.

    Parameters
    ----------
    samples : array_like, shape (..., N)
        Values on the grid ``x_i = x0 + i*dx`` along the last axis.  Leading
        axes are interpolated independently with the same query positions
        when ``query`` is 1-D, or elementwise when ``query`` has the same
        leading shape.
    query : array_like
        Real positions, in the same units as ``x0``/``dx``.
    taps : int
        Even kernel length, at least 4.
    kaiser_beta : float
        Kaiser window shape parameter.

    Returns
    -------
    values : ndarray
        Interpolated values; zero where the query falls outside
        ``[x_0, x_{N-1}]``.
    outside : ndarray of bool
        Out-of-support mask, same shape as ``values``.
    """
    if taps < 4 or taps % 2:
        raise ValueError(f"taps must be even and >= 4, got {taps}")
    s = np.asarray(samples, dtype=np.complex128)
    n = s.shape[-1]
    pos = (np.asarray(query, dtype=float) - x0) / dx
    if pos.ndim == 1 and s.ndim > 1:
        pos = np.broadcast_to(pos, s.shape[:-1] + pos.shape)
    outside = (pos < -1e-9) | (pos > n - 1 + 1e-9)

    base = np.floor(pos).astype(np.int64)
    k = np.arange(-taps // 2 + 1, taps // 2 + 1)
    idx = base[..., None] + k
    w = kaiser_sinc_weights(pos[..., None] - idx, taps, kaiser_beta)
    valid = (idx >= 0) & (idx < n)
    w = np.where(valid, w, 0.0)
    idx = np.clip(idx, 0, n - 1)

    if s.ndim == 1:
        gathered = s[idx]
    else:
        lead = s.reshape(-1, n)
        flat_idx = idx.reshape(lead.shape[0], -1)
        gathered = np.take_along_axis(lead, flat_idx, axis=1).reshape(idx.shape)
    out = np.sum(gathered * w, axis=-1)
    out[outside] = 0.0
    _bump("interp_calls")
    _bump("interp_kernel_evals", int(w.size))
    return out, outside
