"""Exporter configuration."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence


class AdapterError(ValueError):
    pass


@dataclass(frozen=True)
class AdapterConfig:
    model: str                       # backend identifier, e.g. "replay" or "motion"
    input_path: str
    output_path: str
    score_floor: float = 0.0         # keep at or below the pipeline's modeling threshold
    vocabulary: Optional[Sequence[str]] = None   # None = open vocabulary, pass everything
    stride: int = 1

    def validate(self) -> None:
        if not 0.0 <= self.score_floor <= 1.0:
            raise AdapterError("score_floor must be in [0, 1]")
        if self.stride < 1:
            raise AdapterError("stride must be >= 1")
        if self.vocabulary is not None and not all(
            isinstance(v, str) for v in self.vocabulary
        ):
            raise AdapterError("vocabulary must be a list of label strings")
