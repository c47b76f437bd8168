"""Focused complex images and their pixel coordinate frame."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dsp

__all__ = ["ComplexImage", "PixelGrid"]


@dataclass(frozen=True)
class PixelGrid:
    """Image-frame pixel lattice.

    Column ``c`` sits at ``x = (c - c0) * dx`` (range) and row ``r`` at
    ``y = (r - r0) * dy`` (azimuth), both in the frame rotated by the frame
    azimuth.  ``c0, r0`` are where the centring shift puts zero frequency:
    ``N/2`` for even sizes.
    """

    n_rows: int
    n_cols: int
    dx: float
    dy: float

    @property
    def row0(self) -> int:
        return dsp.centre_index(self.n_rows)

    @property
    def col0(self) -> int:
        return dsp.centre_index(self.n_cols)

    def x_axis(self) -> np.ndarray:
        return (np.arange(self.n_cols) - self.col0) * self.dx

    def y_axis(self) -> np.ndarray:
        return (np.arange(self.n_rows) - self.row0) * self.dy

    def to_pixel(self, x, y):
        """Fractional (row, col) of image-frame coordinates."""
        return np.asarray(y) / self.dy + self.row0, np.asarray(x) / self.dx + self.col0

    def to_metres(self, row, col):
        """Image-frame (x, y) of fractional (row, col)."""
        return (np.asarray(col) - self.col0) * self.dx, (np.asarray(row) - self.row0) * self.dy


@dataclass(frozen=True)
class ComplexImage:
    """Focused image ``[azimuth rows, range cols]`` with spacing and frame rotation."""

    data: np.ndarray
    dx: float
    dy: float
    theta_k: float

    def __post_init__(self):
        object.__setattr__(self, "data", dsp.as_complex_matrix(self.data))
        if not (self.dx > 0 and self.dy > 0):
            raise ValueError("pixel spacings must be positive")

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def grid(self) -> PixelGrid:
        return PixelGrid(self.data.shape[0], self.data.shape[1], self.dx, self.dy)

    def energy(self) -> float:
        return float(np.sum(np.abs(self.data) ** 2))
