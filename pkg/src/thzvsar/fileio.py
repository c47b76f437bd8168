"""Binary phase-history and image dumps, magnitude renders and report files.

VSARPH1 (little endian)::

    8s   magic b"VSARPH1\\0"
    u32  n_pulses
    u32  n_fast
    u8   rvp_state (0 raw, 1 removed)
    11 x f64  f_c, B, f_s, T_r, PRF, c, R_a, phi, v, theta_k, d_theta
    n_pulses * n_fast complex64 (re, im interleaved), row-major by pulse

VSARIM1 uses the same header shape with ``n_rows, n_cols`` and a reserved
zero byte, followed by three f64 ``dx, dy, theta_k`` and the complex64
samples.  Every file is written to a temporary name and renamed into place.
"""

from __future__ import annotations

import contextlib
import csv
import dataclasses
import io
import json
import os
import struct
import tempfile
import warnings
from pathlib import Path

import numpy as np

from .analysis import QualityReport, TargetQuality
from .echo import PhaseHistory, RvpState
from .geometry import FrameGeometry, RadarParams
from .image import ComplexImage

__all__ = [
    "FormatError",
    "atomic_write",
    "write_phase_history",
    "read_phase_history",
    "write_image",
    "read_image",
    "render_magnitude",
    "write_pgm",
    "write_reports_csv",
    "read_reports_csv",
    "write_reports_json",
    "read_reports_json",
]

PH_MAGIC = b"VSARPH1\x00"
IM_MAGIC = b"VSARIM1\x00"
_HEAD = struct.Struct("<8sIIB")
_PH_PARAMS = struct.Struct("<11d")
_IM_PARAMS = struct.Struct("<3d")


class FormatError(ValueError):
    pass


def _read_umask() -> int:
    mask = os.umask(0)
    os.umask(mask)
    return mask


# read once at import: os.umask is process-wide and not safe to toggle from worker threads
_UMASK = _read_umask()


def atomic_write(path, payload: bytes) -> Path:
    """Write ``payload`` to ``path`` through a temporary file and ``os.replace``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.chmod(tmp, 0o666 & ~_UMASK)
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        raise
    return path


def _samples(data: np.ndarray) -> bytes:
    return np.ascontiguousarray(data, dtype="<c8").tobytes()


def _read_samples(buf: bytes, offset: int, shape: tuple[int, int], what: str) -> np.ndarray:
    need = shape[0] * shape[1] * 8
    if len(buf) - offset != need:
        raise FormatError(f"{what}: expected {need} sample bytes, found {len(buf) - offset}")
    return np.frombuffer(buf, dtype="<c8", offset=offset).reshape(shape).astype(np.complex128)


def encode_phase_history(ph: PhaseHistory) -> bytes:
    p, g = ph.params, ph.geom
    head = _HEAD.pack(PH_MAGIC, g.n_pulses, p.n_fast, int(ph.rvp_state))
    params = _PH_PARAMS.pack(p.f_c, p.bandwidth, p.f_s, p.pulse_width, p.prf, p.c,
                             g.slant_range, g.grazing, g.speed, g.theta_k, g.d_theta)
    return head + params + _samples(ph.data)


def decode_phase_history(buf: bytes) -> PhaseHistory:
    if len(buf) < _HEAD.size + _PH_PARAMS.size:
        raise FormatError("VSARPH1: truncated header")
    magic, n_pulses, n_fast, state = _HEAD.unpack_from(buf)
    if magic != PH_MAGIC:
        raise FormatError(f"not a VSARPH1 file (magic {magic!r})")
    f_c, b, f_s, t_r, prf, c, r_a, phi, v, theta_k, d_theta = _PH_PARAMS.unpack_from(buf, _HEAD.size)
    p = RadarParams(f_c, b, f_s, t_r, prf, c)
    if p.n_fast != n_fast:
        raise FormatError(f"VSARPH1: header n_fast={n_fast} disagrees with f_s*T_r={p.n_fast}")
    g = FrameGeometry(r_a, phi, v, theta_k, n_pulses, d_theta)
    data = _read_samples(buf, _HEAD.size + _PH_PARAMS.size, (n_pulses, n_fast), "VSARPH1")
    return PhaseHistory(data, p, g, RvpState(state))


def write_phase_history(path, ph: PhaseHistory) -> Path:
    """Write a VSARPH1 file; samples are quantised to complex64 here, once."""
    return atomic_write(path, encode_phase_history(ph))


def read_phase_history(path) -> PhaseHistory:
    return decode_phase_history(Path(path).read_bytes())


def encode_image(img: ComplexImage) -> bytes:
    rows, cols = img.shape
    head = _HEAD.pack(IM_MAGIC, rows, cols, 0)
    return head + _IM_PARAMS.pack(img.dx, img.dy, img.theta_k) + _samples(img.data)


def decode_image(buf: bytes) -> ComplexImage:
    if len(buf) < _HEAD.size + _IM_PARAMS.size:
        raise FormatError("VSARIM1: truncated header")
    magic, rows, cols, _ = _HEAD.unpack_from(buf)
    if magic != IM_MAGIC:
        raise FormatError(f"not a VSARIM1 file (magic {magic!r})")
    dx, dy, theta_k = _IM_PARAMS.unpack_from(buf, _HEAD.size)
    data = _read_samples(buf, _HEAD.size + _IM_PARAMS.size, (rows, cols), "VSARIM1")
    return ComplexImage(data, dx, dy, theta_k)


def write_image(path, img: ComplexImage) -> Path:
    return atomic_write(path, encode_image(img))


def read_image(path) -> ComplexImage:
    return decode_image(Path(path).read_bytes())


def render_magnitude(img: ComplexImage | np.ndarray, floor_db: float = -60.0) -> bytes:
    """16-bit binary PGM of the magnitude in dB.

    ``clamp(20 log10(|s|/max|s|), floor_db, 0)`` maps linearly onto
    ``[0, 65535]`` with round-half-to-even.  An all-zero image renders
    black and emits a warning.
    """
    if not floor_db < 0:
        raise ValueError("floor_db must be negative")
    data = img.data if isinstance(img, ComplexImage) else np.asarray(img)
    mag = np.abs(data).astype(np.float64)
    rows, cols = mag.shape
    top = mag.max() if mag.size else 0.0
    if top == 0:
        warnings.warn("rendering an all-zero image", RuntimeWarning, stacklevel=2)
        level = np.zeros(mag.shape)
    else:
        with np.errstate(divide="ignore"):
            db = 20 * np.log10(mag / top)
        level = (np.clip(db, floor_db, 0.0) - floor_db) / -floor_db
    pix = np.rint(level * 65535).astype(">u2")
    return f"P5\n{cols} {rows}\n65535\n".encode("ascii") + pix.tobytes()


def write_pgm(path, img, floor_db: float = -60.0) -> Path:
    return atomic_write(path, render_magnitude(img, floor_db))


_FIELDS = [f.name for f in dataclasses.fields(TargetQuality)]
_COLUMNS = ["theta_k"] + _FIELDS
_INTS = {"target_id"}
_STRS = {"method", "error", "flags"}


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(float(v))
    return str(v)


def _parse(name: str, text: str):
    if name in _INTS:
        return int(text)
    if name == "flags":
        return text
    if text == "":
        return None
    if name in _STRS:
        return text
    return float(text)


def write_reports_csv(path, reports) -> Path:
    """One row per target per report; floats are written with ``repr`` so they round-trip."""
    if isinstance(reports, QualityReport):
        reports = [reports]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_COLUMNS)
    for rep in reports:
        for rec in rep.records:
            w.writerow([_cell(float(rep.theta_k))] + [_cell(getattr(rec, f)) for f in _FIELDS])
    return atomic_write(path, buf.getvalue().encode())


def read_reports_csv(path) -> list[QualityReport]:
    """Inverse of :func:`write_reports_csv`, grouped by (method, theta_k) in file order.

    Reports without records are not representable in CSV and come back absent.
    """
    out: dict[tuple[str, float], QualityReport] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != _COLUMNS:
            raise FormatError(f"unexpected report columns {reader.fieldnames}")
        for row in reader:
            rec = TargetQuality(**{f: _parse(f, row[f]) for f in _FIELDS})
            key = (rec.method, float(row["theta_k"]))
            out.setdefault(key, QualityReport(key[0], key[1])).records.append(rec)
    return list(out.values())


def _report_dict(rep: QualityReport) -> dict:
    return {"method": rep.method, "theta_k": float(rep.theta_k),
            "records": [dataclasses.asdict(r) for r in rep.records]}


def write_reports_json(path, reports) -> Path:
    """JSON mirror of the CSV report.  ``-inf`` PSLR/ISLR values are written as ``-Infinity``."""
    if isinstance(reports, QualityReport):
        reports = [reports]
    text = json.dumps({"reports": [_report_dict(r) for r in reports]}, indent=2)
    return atomic_write(path, (text + "\n").encode())


def read_reports_json(path) -> list[QualityReport]:
    doc = json.loads(Path(path).read_text())
    reports = []
    for item in doc["reports"]:
        rep = QualityReport(item["method"], float(item["theta_k"]))
        for r in item["records"]:
            if set(r) != set(_FIELDS):
                raise FormatError(f"unexpected record fields {sorted(r)}")
            rec = TargetQuality(**r)
            for f in _FIELDS:
                if f not in _INTS | _STRS and getattr(rec, f) is not None:
                    setattr(rec, f, float(getattr(rec, f)))
            rep.records.append(rec)
        reports.append(rep)
    return reports
