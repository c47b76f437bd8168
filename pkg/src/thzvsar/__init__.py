"""Terahertz video SAR image formation with an interpolation-free polar format algorithm.

Modules
-------
dsp         spectral primitives and operation counters
geometry    circular trajectory, ranges and wavenumbers
echo        dechirped point-target simulator
pfa_interp  baseline PFA with windowed-sinc resampling
pfa_cs      chirp-scaling PFA (FFTs and complex multiplies only)
analysis    oracle imager and IRW/PSLR/ISLR metrics
"""

from .analysis import QualityReport, TargetQuality, locate_peak, oracle_image, quality_report
from .echo import PhaseHistory, RvpState, remove_rvp, simulate
from .geometry import FrameGeometry, PointTarget, RadarParams, Scene, SceneError, default_scene
from .image import ComplexImage, PixelGrid
from .pfa_cs import focus_cs
from .pfa_interp import focus_interp

__version__ = "0.1.0"

__all__ = [
    "ComplexImage",
    "FrameGeometry",
    "PhaseHistory",
    "PixelGrid",
    "PointTarget",
    "QualityReport",
    "RadarParams",
    "RvpState",
    "Scene",
    "SceneError",
    "TargetQuality",
    "default_scene",
    "focus_cs",
    "focus_interp",
    "locate_peak",
    "oracle_image",
    "quality_report",
    "remove_rvp",
    "simulate",
]
