"""Advisory findings: problems worth reporting that are not failures."""

from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class Finding:
    kind: str
    message: str
    position: int | None = None
    turn_index: int | None = None
    label: str | None = None

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}
