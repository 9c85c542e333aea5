"""Dataclass configuration for every tunable default, with dict/JSON round trip.

A single ``RunConfig`` aggregates the per-stage configs so a run can be
reproduced from its manifest digest alone.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field


@dataclass
class CompilerConfig:
    # Speaking rate plus a fixed inter-sentence pause models docent cadence;
    # PlayAudio duration = words / rate + pause.
    speaking_rate_wps: float = 2.5
    sentence_pause_s: float = 2.5
    arrival_template: str = "We are approaching {stop}."
    departure_template: str = "Let us move to the next stop."
    laser_revolutions: int = 3


@dataclass
class BlinkConfig:
    # Interval draw is a truncated normal; mean is tuned so the realized
    # blink rate lands on 23.3/min after truncation and double blinks.
    mean_interval_s: float = 2.66
    interval_sd_s: float = 2.0
    min_interval_s: float = 0.1
    p_double: float = 0.2
    double_gap_s: float = 0.25


@dataclass
class EngineConfig:
    tick_s: float = 0.1
    look_hold_s: float = 1.0
    look_align_tol_rad: float = 0.02
    track_fallback_s: float = 2.0
    laser_rev_period_s: float = 1.0
    laser_samples_per_rev: int = 36
    laser_radius_scale: float = 0.25
    laser_blocked_sector_deg: tuple[float, float] = (-150.0, -30.0)
    head_yaw_limits_rad: tuple[float, float] = (-2.62, 2.62)
    head_pitch_limits_rad: tuple[float, float] = (-0.70, 0.70)
    laser_yaw_limits_rad: tuple[float, float] = (-3.14, 3.14)
    laser_pitch_limits_rad: tuple[float, float] = (-1.20, 1.20)
    kalman_q: float = 0.5
    kalman_r: float = 0.05
    blink: BlinkConfig = field(default_factory=BlinkConfig)


@dataclass
class SimConfig:
    base_speed_mps: float = 0.5
    turn_rate_radps: float = 1.5
    servo_slew_radps: float = 2.0
    arrive_tol_m: float = 0.05
    heading_tol_rad: float = 0.03
    head_pivot_height_m: float = 1.2
    laser_offset_body: tuple[float, float, float] = (0.0, 0.15, 0.9)
    cam_width_px: int = 640
    cam_height_px: int = 360
    cam_hfov_deg: float = 69.0
    cam_vfov_deg: float = 42.0
    face_noise_m: float = 0.02
    depth_noise_m: float = 0.005
    bbox_jitter_px: int = 2
    grid_resolution_m: float = 0.05
    local_window_m: float = 4.0
    wall_margin_m: float = 1.0
    wall_inflate_m: float = 0.35
    room_depth_m: float = 6.0
    start_pose: tuple[float, float, float] = (-3.0, 1.8, 0.0)
    visitor_face_height_m: float = 1.6
    visitor_walk_speed_mps: float = 1.0
    visitor_standoff_m: float = 1.3
    gaze_rate_hz: float = 50.0
    gaze_jitter_m: float = 0.02
    reaction_latency_mean_s: float = 0.5
    reaction_latency_sd_s: float = 0.1
    label_dwell_s: float = 1.2
    search_onset_s: float = 2.0
    distraction_p_per_tick: float = 0.01
    distraction_dwell_s: float = 0.3


@dataclass
class AnalyticsConfig:
    dispersion_threshold_m: float = 0.05
    min_fixation_s: float = 0.10


@dataclass
class RunConfig:
    compiler: CompilerConfig = field(default_factory=CompilerConfig)
    engine: EngineConfig = field(default_factory=EngineConfig)
    sim: SimConfig = field(default_factory=SimConfig)
    analytics: AnalyticsConfig = field(default_factory=AnalyticsConfig)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        cfg = cls()
        for section, values in data.items():
            target = getattr(cfg, section, None)
            if target is None or not dataclasses.is_dataclass(target):
                raise KeyError(f"unknown config section: {section}")
            _apply(target, values, section)
        return cfg

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def digest(self) -> str:
        """Stable hash over every parameter that affects determinism."""
        blob = json.dumps(self.to_dict(), sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()


def _apply(target, values: dict, path: str) -> None:
    names = {f.name: f for f in dataclasses.fields(target)}
    for key, value in values.items():
        if key not in names:
            raise KeyError(f"unknown config key: {path}.{key}")
        current = getattr(target, key)
        if dataclasses.is_dataclass(current):
            _apply(current, value, f"{path}.{key}")
        elif isinstance(current, tuple):
            setattr(target, key, tuple(value))
        else:
            setattr(target, key, type(current)(value))
