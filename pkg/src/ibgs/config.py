"""Pipeline configuration: confidence/motion/foreground thresholds and tracker knobs."""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from typing import Any, Optional

MATCH_MODES = ("max-over-model", "by-id")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TrackerParams:
    match_iou_min: float = 0.3
    max_age: int = 30
    min_hits: int = 3
    history_cap: int = 1000

    def validate(self) -> None:
        if not 0.0 <= self.match_iou_min <= 1.0:
            raise ConfigError("match_iou_min must be in [0, 1]")
        for name in ("max_age", "min_hits", "history_cap"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")


@dataclass(frozen=True)
class Config:
    tau_conf: float = 0.6
    tau_move: float = 0.5
    tau_fore: float = 0.8
    delta_conf: float = 0.1
    update_period: int = 100
    filter_window: int = 5
    match_mode: str = "max-over-model"
    use_iof: bool = True
    # motion is judged over the full stored trajectory by default; set to a
    # positive count to judge only the most recent history entries
    trajectory_span: Optional[int] = None
    tracker: TrackerParams = field(default_factory=TrackerParams)

    def validate(self) -> None:
        for name in ("tau_conf", "tau_move", "tau_fore"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1]")
        if self.delta_conf < 0.0:
            raise ConfigError("delta_conf must be >= 0")
        if self.tau_conf - self.delta_conf < 0.0:
            raise ConfigError("tau_conf - delta_conf must be >= 0")
        if self.update_period < 1:
            raise ConfigError("update_period must be >= 1")
        if self.filter_window < 1 or self.filter_window % 2 == 0:
            raise ConfigError("filter_window must be an odd integer >= 1")
        if self.trajectory_span is not None and self.trajectory_span < 1:
            raise ConfigError("trajectory_span must be >= 1 when set")
        if self.match_mode not in MATCH_MODES:
            raise ConfigError(f"match_mode must be one of {MATCH_MODES}")
        self.tracker.validate()

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Config":
        # a run report embeds the config under "config"; accept either form
        if "config" in data and isinstance(data["config"], dict):
            data = data["config"]
        tracker = TrackerParams(**data.get("tracker", {}))
        fields = {k: v for k, v in data.items() if k != "tracker"}
        known = {f for f in cls.__dataclass_fields__ if f != "tracker"}
        unknown = set(fields) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(tracker=tracker, **fields)
        cfg.validate()
        return cfg
