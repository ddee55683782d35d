"""Engine configuration: scoring knobs plus presentation metadata.

The engine config wraps a ScoringConfig and adds the pieces the CLI and
service need: candidate quantile options, recall levels for reports, the
RNG algorithm name recorded in test sets, and the red-to-green color
intervals the dashboard binds to each measure. Config files are JSON
with the scoring fields at top level.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .exceptions import MalformedManifest
from .measures import MEASURES, ScoringConfig
from .tamper import RNG_ALGORITHM

DEFAULT_QUANTILE_OPTIONS = (0.75, 0.9, 0.95)
DEFAULT_RECALL_LEVELS = (0.25, 0.5, 1.0)
# measure value at the interval's lower bound renders pure red, 1.0 pure
# green; values below the interval clamp to red
DEFAULT_COLOR_INTERVALS: dict[str, tuple[float, float]] = {
    "cmps": (0.45, 1.0),
    "cmls": (0.6, 1.0),
    "cmes": (0.7, 1.0),
    "cmcs": (0.0, 1.0),
}


@dataclass(frozen=True)
class EngineConfig:
    scoring: ScoringConfig = field(default_factory=ScoringConfig)
    quantile_options: tuple[float, ...] = DEFAULT_QUANTILE_OPTIONS
    recall_levels: tuple[float, ...] = DEFAULT_RECALL_LEVELS
    color_intervals: Mapping[str, tuple[float, float]] = field(
        default_factory=lambda: dict(DEFAULT_COLOR_INTERVALS)
    )
    rng_algorithm: str = RNG_ALGORITHM

    def __post_init__(self) -> None:
        for q in self.quantile_options:
            if not 0 < q <= 1:
                raise ValueError(f"quantile option {q} outside (0, 1]")
        for r in self.recall_levels:
            if not 0 < r <= 1:
                raise ValueError(f"recall level {r} outside (0, 1]")
        for measure, interval in self.color_intervals.items():
            if measure not in MEASURES:
                raise ValueError(f"color interval for unknown measure {measure!r}")
            lower, upper = interval
            if not lower < upper:
                raise ValueError(f"color interval for {measure} needs lower < upper")

    def to_payload(self) -> dict[str, object]:
        payload: dict[str, object] = dict(self.scoring.to_mapping())
        payload["quantile_options"] = list(self.quantile_options)
        payload["recall_levels"] = list(self.recall_levels)
        payload["color_intervals"] = {
            measure: list(interval)
            for measure, interval in sorted(self.color_intervals.items())
        }
        payload["rng_algorithm"] = self.rng_algorithm
        return payload

    @classmethod
    def from_payload(cls, payload: Mapping[str, object]) -> "EngineConfig":
        scoring_keys = {
            "tau_p",
            "person_mode",
            "person_aggregator",
            "location_aggregator",
            "event_aggregator",
        }
        scoring = ScoringConfig.from_mapping(
            {k: v for k, v in payload.items() if k in scoring_keys}
        )
        known = scoring_keys | {
            "quantile_options",
            "recall_levels",
            "color_intervals",
            "rng_algorithm",
        }
        unknown = set(payload) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        intervals_raw = payload.get("color_intervals", DEFAULT_COLOR_INTERVALS)
        intervals = {
            str(measure): (float(bounds[0]), float(bounds[1]))
            for measure, bounds in dict(intervals_raw).items()
        }
        return cls(
            scoring=scoring,
            quantile_options=tuple(
                float(q)
                for q in payload.get("quantile_options", DEFAULT_QUANTILE_OPTIONS)
            ),
            recall_levels=tuple(
                float(r) for r in payload.get("recall_levels", DEFAULT_RECALL_LEVELS)
            ),
            color_intervals=intervals,
            rng_algorithm=str(payload.get("rng_algorithm", RNG_ALGORITHM)),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "EngineConfig":
        path = Path(path)
        try:
            payload = json.loads(path.read_text())
        except OSError as exc:
            raise MalformedManifest(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise MalformedManifest(f"{path}: invalid JSON: {exc}") from exc
        if not isinstance(payload, dict):
            raise MalformedManifest(f"{path}: config must be a JSON object")
        try:
            return cls.from_payload(payload)
        except (TypeError, ValueError, KeyError, IndexError) as exc:
            raise MalformedManifest(f"{path}: invalid config: {exc}") from exc
