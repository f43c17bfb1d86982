from __future__ import annotations
import json
import logging
from dataclasses import dataclass, asdict, field
from typing import Optional

logger = logging.getLogger(__name__)


@dataclass
class TranscriptEntry:
    step: str = "Note"
    detail: Optional[str] = None
    metadata: Optional[str] = None   # JSON blob

    def to_dict(self) -> dict:
        d = asdict(self)
        if d.get("metadata"):
            try:
                d["metadata_parsed"] = json.loads(d["metadata"])
            except (json.JSONDecodeError, TypeError):
                d["metadata_parsed"] = {}
        return d


@dataclass
class Transcript:
    """Append-only record of the steps an operation took."""

    entries: list[TranscriptEntry] = field(default_factory=list)

    def note(self, step: str, detail: str = None, metadata: dict = None) -> int:
        """Append an immutable entry. Returns its index."""
        meta_str = json.dumps(metadata, sort_keys=True, default=str) if metadata else None
        self.entries.append(TranscriptEntry(step, detail, meta_str))
        logger.info(f"{step}: {detail}" if detail else step)
        return len(self.entries) - 1

    def extend(self, other: "Transcript", prefix: str = "") -> None:
        for e in other.entries:
            self.entries.append(TranscriptEntry(f"{prefix}{e.step}", e.detail, e.metadata))

    def steps(self) -> list[str]:
        return [e.step for e in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def to_dict(self) -> list[dict]:
        return [e.to_dict() for e in self.entries]

    def text(self) -> str:
        lines = []
        for i, e in enumerate(self.entries):
            line = f"[{i}] {e.step}"
            if e.detail:
                line += f": {e.detail}"
            lines.append(line)
        return "\n".join(lines)
