"""Finding record shared by both detection engines."""

from __future__ import annotations

from dataclasses import dataclass

from ..catalog import SmellId
from ..hcl import SourceSpan


@dataclass(frozen=True)
class SmellFinding:
    smell: SmellId
    path: str
    span: SourceSpan
    evidence: str
    engine: str  # "ast" | "pattern"
    message: str

    def __post_init__(self) -> None:
        if not self.evidence:
            raise ValueError("finding evidence must be non-empty")
        if self.engine not in ("ast", "pattern"):
            raise ValueError(f"unknown engine {self.engine!r}")

    def sort_key(self) -> tuple:
        return (
            self.path,
            self.span.start_line,
            self.span.start_col,
            int(self.smell),
            self.engine,
        )

    def to_json_dict(self) -> dict:
        return {
            "smell": self.smell.name,
            "path": self.path,
            "span": {
                "start_line": self.span.start_line,
                "start_col": self.span.start_col,
                "end_line": self.span.end_line,
                "end_col": self.span.end_col,
            },
            "evidence": self.evidence,
            "engine": self.engine,
            "message": self.message,
        }
