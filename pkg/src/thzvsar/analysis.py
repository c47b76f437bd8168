"""Ground-truth imaging and point-target image-quality metrics.

The focused images are zero-padded DFTs of finite wavenumber data, so
their exact band-limited interpolant is the trigonometric polynomial
defined by the image's own 2-D spectrum.  Peak refinement and profile cuts
evaluate that interpolant directly, which is the same as zero-padding the
whole image spectrum but only computed where it is needed.
"""

from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.fft

from .echo import PhaseHistory, RvpState
from .geometry import PointTarget, Scene, fast_time_axis, frame_pulse_angles, radial_wavenumber, rotate_to_frame
from .image import ComplexImage, PixelGrid

__all__ = [
    "MetricError",
    "MetricWarning",
    "Peak",
    "Profile",
    "TargetQuality",
    "QualityReport",
    "oracle_image",
    "locate_peak",
    "profile_cut",
    "irw",
    "pslr",
    "islr",
    "quality_report",
]

ORACLE_LIMIT = 128
FLOOR_DB = -100.0


class MetricError(ValueError):
    """A metric is undefined for this response (e.g. no -3 dB crossing)."""


class MetricWarning(UserWarning):
    pass


def oracle_image(ph: PhaseHistory, grid: PixelGrid, *, force: bool = False) -> ComplexImage:
    """Direct non-uniform DFT image on an arbitrary pixel grid.

    ``image(x, y) = sum S(n, m) exp(-j (x K_X + y K_Y)) / sqrt(rows * cols)``
    with the polar wavenumbers expressed in the frame of the frame azimuth.
    The normalisation matches the unitary zero-padded FFTs of the focusers
    when ``grid`` has their output size.
    """
    if ph.rvp_state is not RvpState.REMOVED:
        raise ValueError("oracle_image needs an RVP-free phase history")
    n_p, n_f = ph.shape
    too_big = max(n_p, n_f, grid.n_rows, grid.n_cols) > ORACLE_LIMIT
    if too_big and not force:
        raise ValueError(
            f"oracle imaging is limited to {ORACLE_LIMIT}x{ORACLE_LIMIT} samples and pixels; pass force=True")
    p, g = ph.params, ph.geom
    k_r = radial_wavenumber(p, g, fast_time_axis(p))
    rel = frame_pulse_angles(g) - g.theta_k
    kx = (np.cos(rel)[:, None] * k_r[None, :]).ravel()
    ky = (np.sin(rel)[:, None] * k_r[None, :]).ravel()
    s = ph.data.ravel()
    y = grid.y_axis()
    x = grid.x_axis()
    left = s[None, :] * np.exp(-1j * np.outer(y, ky))
    right = np.exp(-1j * np.outer(kx, x))
    img = left @ right / math.sqrt(grid.n_rows * grid.n_cols)
    return ComplexImage(img, grid.dx, grid.dy, g.theta_k)


def _band(power: np.ndarray) -> np.ndarray:
    """Integer frequencies of DFT bins, centred on the spectral energy centroid.

    An image whose spectral support is one contiguous band of at most ``n``
    bins has its exact continuous response only when every bin is assigned
    the frequency inside that band, wherever it sits relative to DC.
    """
    n = power.size
    k = np.arange(n)
    centroid = np.angle(np.sum(power * np.exp(2j * np.pi * k / n))) * n / (2 * np.pi)
    lo = math.ceil(centroid - n / 2)
    return lo + np.mod(k - lo, n)


class _Interpolant:
    """Evaluates the band-limited interpolant of an image at fractional pixels."""

    def __init__(self, data: np.ndarray):
        self.data = data
        self.n_rows, self.n_cols = data.shape
        self.spec = scipy.fft.fft2(data)
        power = np.abs(self.spec) ** 2
        self.k_rows = _band(power.sum(axis=1))
        self.k_cols = _band(power.sum(axis=0))

    def grid(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        er = np.exp(2j * np.pi * np.outer(rows, self.k_rows) / self.n_rows)
        ec = np.exp(2j * np.pi * np.outer(self.k_cols, cols) / self.n_cols)
        return er @ self.spec @ ec / (self.n_rows * self.n_cols)

    def line(self, axis: str, at: float, start: float, oversample: int) -> np.ndarray:
        """Periodic cut sampled at ``start + j/oversample`` for all ``j``.

        ``axis="range"`` runs along columns at fractional row ``at``;
        ``"azimuth"`` runs along rows at fractional column ``at``.
        """
        if axis == "range":
            w = np.exp(2j * np.pi * self.k_rows * at / self.n_rows)
            spec = w @ self.spec / self.n_rows
            k, n = self.k_cols, self.n_cols
        else:
            w = np.exp(2j * np.pi * self.k_cols * at / self.n_cols)
            spec = self.spec @ w / self.n_cols
            k, n = self.k_rows, self.n_rows
        big = np.zeros(n * oversample, dtype=np.complex128)
        big[np.mod(k, n * oversample)] = spec * np.exp(2j * np.pi * k * start / n)
        return scipy.fft.ifft(big) * oversample


_CACHE = threading.local()


def _interpolant(img: ComplexImage) -> _Interpolant:
    # one cached spectrum per thread: a report makes many cuts of one image
    cached = getattr(_CACHE, "value", None)
    if cached is None or cached.data is not img.data:
        cached = _Interpolant(img.data)
        _CACHE.value = cached
    return cached


@dataclass(frozen=True)
class Peak:
    x: float
    y: float
    value: complex
    row: float
    col: float


def _parabolic(m: np.ndarray, i: int) -> float:
    if 0 < i < m.size - 1:
        a, b, c = m[i - 1], m[i], m[i + 1]
        den = a - 2 * b + c
        if den < 0:
            return 0.5 * (a - c) / den
    return 0.0


def locate_peak(img: ComplexImage, oversample: int = 16, *, near: tuple[float, float] | None = None,
                search_px: int = 8) -> Peak:
    """Sub-pixel peak of ``|img|``.

    The coarse maximum is the first one in row-major order (lowest row,
    then lowest column).  It is refined on a ``1/oversample`` pixel lattice
    of the band-limited interpolant, then by a parabola through the three
    lattice samples around the maximum on each axis.  ``near`` restricts the
    coarse search to ``search_px`` pixels around an image-frame position
    (metres).
    """
    mag = np.abs(img.data)
    if not np.any(mag):
        raise ValueError("cannot locate the peak of an all-zero image")
    grid = img.grid
    r0 = c0 = 0
    window = mag
    if near is not None:
        rr, cc = grid.to_pixel(*near)
        r0 = max(int(round(float(rr))) - search_px, 0)
        c0 = max(int(round(float(cc))) - search_px, 0)
        window = mag[r0:r0 + 2 * search_px + 1, c0:c0 + 2 * search_px + 1]
        if not np.any(window):
            raise ValueError(f"no response within {search_px} px of {near}")
    i = int(np.argmax(window))
    row, col = divmod(i, window.shape[1])
    row += r0
    col += c0

    steps = np.arange(-oversample, oversample + 1) / oversample
    patch = np.abs(_interpolant(img).grid(row + steps, col + steps))
    ir, ic = np.unravel_index(int(np.argmax(patch)), patch.shape)
    fr = row + steps[ir] + _parabolic(patch[:, ic], ir) / oversample
    fc = col + steps[ic] + _parabolic(patch[ir, :], ic) / oversample
    value = complex(_interpolant(img).grid(np.array([fr]), np.array([fc]))[0, 0])
    x, y = grid.to_metres(fr, fc)
    return Peak(float(x), float(y), value, float(fr), float(fc))


@dataclass(frozen=True)
class Profile:
    """Magnitude cut in dB (0 dB at ``peak_index``) with sample spacing in metres."""

    db: np.ndarray
    spacing: float
    peak_index: int


def profile_cut(img: ComplexImage, axis: str, peak: Peak, oversample: int = 16) -> Profile:
    """1-D cut through ``peak`` along ``"range"`` (columns) or ``"azimuth"`` (rows).

    The whole periodic line is evaluated at ``oversample`` times the pixel
    rate, aligned so one sample falls exactly on the peak, and re-centred.
    """
    if axis == "range":
        at, start, spacing = peak.row, peak.col, img.dx
    elif axis == "azimuth":
        at, start, spacing = peak.col, peak.row, img.dy
    else:
        raise ValueError(f"axis must be 'range' or 'azimuth', got {axis!r}")
    fine = _interpolant(img).line(axis, at, start, oversample)
    fine = np.roll(fine, fine.size // 2)
    power = np.abs(fine) ** 2
    top = int(np.argmax(power))
    with np.errstate(divide="ignore"):
        db = 10 * np.log10(power / power[top])
    return Profile(db, spacing / oversample, top)


def _crossing(db: np.ndarray, start: int, step: int, level: float) -> float:
    i = start
    while 0 <= i + step < db.size:
        j = i + step
        if db[j] < level:
            a, b = db[i], max(db[j], FLOOR_DB * 10)
            return i + step * (a - level) / (a - b)
        i = j
    raise MetricError(f"profile never falls below {level} dB")


def irw(profile: Profile, level_db: float = -3.0) -> float:
    """Width between the -3 dB crossings, linearly interpolated in dB."""
    right = _crossing(profile.db, profile.peak_index, 1, level_db)
    left = _crossing(profile.db, profile.peak_index, -1, level_db)
    return float((right - left) * profile.spacing)


def _null(db: np.ndarray, start: int, step: int, floor_db: float) -> int:
    i = start
    while 0 <= i + step < db.size:
        if db[i] <= floor_db or db[i + step] >= db[i]:
            return i
        i += step
    if db[i] <= floor_db:
        return i
    raise MetricError("no null found on the profile")


def _lobes(profile: Profile, extent_irw: float, floor_db: float):
    width = irw(profile)
    left = _null(profile.db, profile.peak_index, -1, floor_db)
    right = _null(profile.db, profile.peak_index, 1, floor_db)
    reach = int(round(extent_irw * width / profile.spacing))
    lo = profile.peak_index - reach
    hi = profile.peak_index + reach
    truncated = lo < 0 or hi >= profile.db.size
    if truncated:
        warnings.warn("side-lobe extent exceeds the profile; truncated", MetricWarning, stacklevel=3)
    lo, hi = max(lo, 0), min(hi, profile.db.size - 1)
    return left, right, lo, hi, truncated


def pslr(profile: Profile, extent_irw: float = 10.0, floor_db: float = FLOOR_DB) -> float:
    """Highest side lobe (dB) outside the first nulls, within ``extent_irw`` IRWs.

    Returns ``-inf`` when no side lobe rises above ``floor_db``.
    """
    left, right, lo, hi, _ = _lobes(profile, extent_irw, floor_db)
    side = np.concatenate([profile.db[lo:left], profile.db[right + 1:hi + 1]])
    if side.size == 0 or side.max() <= floor_db:
        return -math.inf
    return float(side.max())


def islr(profile: Profile, sidelobe_extent: float = 10.0, floor_db: float = FLOOR_DB) -> float:
    """Side-lobe to main-lobe energy ratio in dB.

    Main lobe: between the first nulls.  Side lobes: from the nulls out to
    ``sidelobe_extent`` IRWs either side of the peak.
    """
    left, right, lo, hi, _ = _lobes(profile, sidelobe_extent, floor_db)
    power = 10 ** (profile.db / 10)
    main = power[left:right + 1].sum()
    side = power[lo:left].sum() + power[right + 1:hi + 1].sum()
    if side <= 0:
        return -math.inf
    return float(10 * np.log10(side / main))


@dataclass
class TargetQuality:
    target_id: int
    method: str
    truth_x: float
    truth_y: float
    peak_x: float | None = None
    peak_y: float | None = None
    err_x_px: float | None = None
    err_y_px: float | None = None
    irw_range: float | None = None
    irw_azimuth: float | None = None
    pslr_range: float | None = None
    pslr_azimuth: float | None = None
    islr_range: float | None = None
    islr_azimuth: float | None = None
    error: str | None = None
    flags: str = ""

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class QualityReport:
    method: str
    theta_k: float
    records: list[TargetQuality] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


def _measure(img: ComplexImage, rec: TargetQuality, oversample: int, extent: float) -> None:
    peak = locate_peak(img, oversample, near=(rec.truth_x, rec.truth_y))
    rec.peak_x, rec.peak_y = peak.x, peak.y
    rec.err_x_px = float((peak.x - rec.truth_x) / img.dx)
    rec.err_y_px = float((peak.y - rec.truth_y) / img.dy)
    flags = []
    for axis in ("range", "azimuth"):
        prof = profile_cut(img, axis, peak, oversample)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", MetricWarning)
            setattr(rec, f"irw_{axis}", irw(prof))
            setattr(rec, f"pslr_{axis}", pslr(prof, extent))
            setattr(rec, f"islr_{axis}", islr(prof, extent))
        if any(issubclass(w.category, MetricWarning) for w in caught):
            flags.append(f"{axis}_truncated")
    rec.flags = ";".join(flags)


def quality_report(img: ComplexImage, scene: Scene | list[PointTarget], method: str, *,
                   oversample: int = 16, sidelobe_extent: float = 10.0) -> QualityReport:
    """Per-target peak position and IRW/PSLR/ISLR along both image axes.

    Truth positions are the scene coordinates rotated into the image frame.
    A failure on one target is recorded on its row and never aborts the
    report.
    """
    report = QualityReport(method, img.theta_k)
    for i, t in enumerate(scene):
        tx, ty = rotate_to_frame(t.x, t.y, img.theta_k)
        rec = TargetQuality(i, method, float(tx), float(ty))
        try:
            _measure(img, rec, oversample, sidelobe_extent)
        except (MetricError, ValueError) as exc:
            rec.error = str(exc)
        report.records.append(rec)
    return report
