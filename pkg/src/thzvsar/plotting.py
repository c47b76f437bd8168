"""Report figures: dB image with truth markers, and PSF cuts.

Figures are built on bare :class:`matplotlib.figure.Figure` objects (no
``pyplot`` state), so frames can be rendered from worker threads.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .analysis import Profile, QualityReport
from .fileio import atomic_write
from .geometry import Scene, rotate_to_frame
from .image import ComplexImage

__all__ = ["image_figure", "profile_figure", "save_figure", "metrics_table"]

# fixed metadata keeps repeated runs byte-identical
_PNG_META = {"Software": None}


def save_figure(fig: Figure, path) -> Path:
    FigureCanvasAgg(fig)
    buf = io.BytesIO()
    fig.savefig(buf, format="png", dpi=110, metadata=_PNG_META)
    return atomic_write(path, buf.getvalue())


def image_figure(img: ComplexImage, scene: Scene | None = None, *, floor_db: float = -60.0,
                 half_width_m: float = 30.0, title: str = "") -> Figure:
    """Magnitude in dB around the scene centre, image-frame axes in metres."""
    grid = img.grid
    x, y = grid.x_axis(), grid.y_axis()
    cols = np.nonzero(np.abs(x) <= half_width_m)[0]
    rows = np.nonzero(np.abs(y) <= half_width_m)[0]
    mag = np.abs(img.data[rows[0]:rows[-1] + 1, cols[0]:cols[-1] + 1])
    top = np.abs(img.data).max()
    with np.errstate(divide="ignore"):
        db = 20 * np.log10(mag / top) if top > 0 else np.full(mag.shape, floor_db)

    fig = Figure(figsize=(6.0, 5.2))
    ax = fig.add_subplot()
    extent = (x[cols[0]] - img.dx / 2, x[cols[-1]] + img.dx / 2, y[rows[0]] - img.dy / 2, y[rows[-1]] + img.dy / 2)
    im = ax.imshow(db, origin="lower", extent=extent, cmap="gray", vmin=floor_db, vmax=0,
                   interpolation="nearest", aspect="equal")
    if scene is not None and len(scene):
        tx, ty = rotate_to_frame(np.array([t.x for t in scene]), np.array([t.y for t in scene]), img.theta_k)
        ax.plot(tx, ty, "o", mfc="none", mec="tab:red", ms=9, mew=1.0, label="truth")
        ax.legend(loc="upper right", fontsize=8)
    ax.set_xlabel("range x' (m)")
    ax.set_ylabel("azimuth y' (m)")
    ax.set_title(title or f"theta_k = {np.degrees(img.theta_k):.1f} deg")
    fig.colorbar(im, ax=ax, label="dB")
    fig.tight_layout()
    return fig


def profile_figure(cuts: dict[str, Profile], *, span_m: float = 2.0, title: str = "") -> Figure:
    """Range and azimuth cuts (dB) through one peak."""
    fig = Figure(figsize=(6.4, 3.6))
    ax = fig.add_subplot()
    for name, prof in cuts.items():
        pos = (np.arange(prof.db.size) - prof.peak_index) * prof.spacing
        keep = np.abs(pos) <= span_m
        ax.plot(pos[keep], np.maximum(prof.db[keep], -80), lw=1.0, label=name)
    ax.axhline(-3, color="0.6", lw=0.6, ls="--")
    ax.set_ylim(-60, 3)
    ax.set_xlabel("offset from peak (m)")
    ax.set_ylabel("dB")
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return fig


def metrics_table(report: QualityReport) -> str:
    """Tab-delimited per-target summary for terminals and logs."""
    head = ["id", "method", "err_x_px", "err_y_px", "irw_r_m", "irw_a_m", "pslr_r_db", "pslr_a_db",
            "islr_r_db", "islr_a_db", "error"]
    lines = ["\t".join(head)]
    for r in report.records:
        vals = [r.err_x_px, r.err_y_px, r.irw_range, r.irw_azimuth, r.pslr_range, r.pslr_azimuth,
                r.islr_range, r.islr_azimuth]
        cells = [str(r.target_id), r.method] + ["" if v is None else f"{v:.4f}" for v in vals]
        lines.append("\t".join(cells + [r.error or ""]))
    return "\n".join(lines)
