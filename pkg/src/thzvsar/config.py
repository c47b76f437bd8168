"""Strict JSON scenario configuration.

Every field carries its unit in its name.  Unknown keys are rejected, and
loading reports every problem at once with its field path, including the
physical invariants checked by the radar, geometry and scene types.
"""

from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .geometry import C_EXACT, FrameGeometry, PointTarget, RadarParams, Scene

__all__ = ["ConfigError", "ScenarioConfig", "load_config", "parse_config", "default_config_path"]


class ConfigError(ValueError):
    """Configuration problems, one ``path: message`` string per entry."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.errors))


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class RadarConfig(_Strict):
    carrier_frequency_hz: float = Field(gt=0)
    bandwidth_hz: float = Field(gt=0)
    sampling_frequency_hz: float = Field(gt=0)
    pulse_width_s: float = Field(gt=0)
    prf_hz: float = Field(gt=0)
    propagation_speed_m_per_s: float = Field(C_EXACT, gt=0)

    def build(self) -> RadarParams:
        return RadarParams(self.carrier_frequency_hz, self.bandwidth_hz, self.sampling_frequency_hz,
                           self.pulse_width_s, self.prf_hz, self.propagation_speed_m_per_s)


class GeometryConfig(_Strict):
    slant_range_m: float = Field(gt=0)
    grazing_angle_deg: float = Field(ge=0, lt=90)
    speed_m_per_s: float = Field(gt=0)
    frame_azimuths_deg: list[float] = Field(min_length=1)
    pulses_per_frame: int = Field(ge=2)


class TargetConfig(_Strict):
    x_m: float
    y_m: float
    sigma: float = Field(1.0, gt=0)


class SceneConfig(_Strict):
    radius_limit_m: float = Field(50.0, gt=0)
    targets: list[TargetConfig] = Field(default_factory=list)


class SimulationConfig(_Strict):
    mode: Literal["raw", "rvp_free"] = "raw"
    snr_db: Optional[float] = None


class FocusConfig(_Strict):
    method: Literal["cs", "interp", "oracle"] = "cs"
    out_rows: int = Field(1024, ge=2)
    out_cols: int = Field(2048, ge=2)
    oversample: int = Field(16, ge=1)
    interp_taps: int = Field(8, ge=4)
    kaiser_beta: float = Field(4.0, ge=0)
    sidelobe_extent_irw: float = Field(10.0, gt=0)
    support_radius_m: float = Field(40.0, gt=0)
    allow_rvp_free_input: bool = False

    @model_validator(mode="after")
    def _even_taps(self):
        if self.interp_taps % 2:
            raise ValueError("interp_taps must be even")
        return self


class OutputConfig(_Strict):
    directory: str = "out"
    floor_db: float = Field(-60.0, lt=0)
    figures: bool = True


class ScenarioConfig(_Strict):
    radar: RadarConfig
    geometry: GeometryConfig
    scene: SceneConfig = SceneConfig()
    simulation: SimulationConfig = SimulationConfig()
    focus: FocusConfig = FocusConfig()
    outputs: OutputConfig = OutputConfig()

    def radar_params(self) -> RadarParams:
        return self.radar.build()

    def frames(self) -> list[FrameGeometry]:
        p = self.radar_params()
        g = self.geometry
        return [FrameGeometry.circular(p, g.slant_range_m, math.radians(g.grazing_angle_deg), g.speed_m_per_s,
                                       math.radians(az), g.pulses_per_frame)
                for az in g.frame_azimuths_deg]

    def scene_model(self) -> Scene:
        targets = tuple(PointTarget(t.x_m, t.y_m, t.sigma) for t in self.scene.targets)
        return Scene(targets, self.scene.radius_limit_m)


def _physical_errors(cfg: ScenarioConfig) -> list[str]:
    errors = []
    try:
        p = cfg.radar_params()
    except ValueError as exc:
        errors.append(f"radar: {exc}")
        p = None
    if p is not None:
        try:
            cfg.frames()
        except ValueError as exc:
            errors.append(f"geometry: {exc}")
    limit = cfg.scene.radius_limit_m
    for i, t in enumerate(cfg.scene.targets):
        r = math.hypot(t.x_m, t.y_m)
        if r > limit:
            errors.append(f"scene.targets.{i}: target {i} lies {r:g} m from the scene centre, "
                          f"beyond the scene radius guard of {limit:g} m")
    return errors


def parse_config(doc: dict) -> ScenarioConfig:
    """Validate a decoded JSON document; raises :class:`ConfigError` listing every problem."""
    try:
        cfg = ScenarioConfig.model_validate(doc)
    except ValidationError as exc:
        raise ConfigError([f"{'.'.join(str(x) for x in e['loc']) or '<root>'}: {e['msg']}"
                           for e in exc.errors()]) from None
    errors = _physical_errors(cfg)
    if errors:
        raise ConfigError(errors)
    return cfg


def load_config(path=None) -> ScenarioConfig:
    """Load a scenario file; ``None`` loads the shipped reproduction scenario."""
    path = default_config_path() if path is None else Path(path)
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError([f"<file>: not valid JSON ({exc})"]) from None
    except OSError as exc:
        raise ConfigError([f"<file>: cannot read {path} ({exc.strerror})"]) from None
    return parse_config(doc)


def default_config_path() -> Path:
    return Path(str(resources.files("thzvsar").joinpath("data", "reference.json")))
