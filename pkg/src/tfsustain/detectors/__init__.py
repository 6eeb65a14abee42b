"""Smell detection engines and the combined per-corpus runner."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from ..hcl import ConfigFile
from . import ast_engine, pattern_engine
from .config import (
    ConfigError,
    DetectorConfig,
    config_from_dict,
    load_config_file,
)
from .findings import SmellFinding

ENGINES = ("ast", "pattern")


@dataclass(frozen=True)
class ScanUnit:
    """One Terraform file ready for detection.

    ``text`` is None when the file could not be read; ``file`` is None when
    no AST is available. Such units still count toward scan totals.
    """

    path: str
    text: str | None
    file: ConfigFile | None


def unit_for(path: str, text: str) -> ScanUnit:
    from ..hcl import parse

    return ScanUnit(path, text, parse(text, path))


def detect_all(
    units_by_dir: Mapping[str, Sequence[ScanUnit]],
    cfg: DetectorConfig | None = None,
    engine: str = "ast",
) -> list[SmellFinding]:
    """Run all seven detectors over directory-grouped files.

    Findings come back sorted by (path, position, smell). The remote-state
    detector runs once per directory; everything else is per-file.
    """
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; pick one of {ENGINES}")
    if cfg is None:
        cfg = DetectorConfig()
    findings: list[SmellFinding] = []
    for dirname in sorted(units_by_dir):
        units = sorted(units_by_dir[dirname], key=lambda u: u.path)
        for unit in units:
            findings.extend(detect_file(unit, cfg, engine))
        findings.extend(_detect_directory(units, cfg, engine))
    findings.sort(key=lambda f: f.sort_key())
    return findings


def detect_file(unit: ScanUnit, cfg: DetectorConfig, engine: str) -> list[SmellFinding]:
    """Per-file detectors for one engine (everything except remote state)."""
    findings: list[SmellFinding] = []
    if engine == "ast":
        if unit.file is not None:
            for detector in ast_engine.PER_FILE_DETECTORS:
                findings.extend(detector(unit.file, cfg))
    else:
        if unit.text is not None:
            for detector in pattern_engine.PER_FILE_PATTERNS:
                findings.extend(detector(unit.path, unit.text, cfg))
    return findings


def _detect_directory(
    units: Sequence[ScanUnit], cfg: DetectorConfig, engine: str
) -> list[SmellFinding]:
    if engine == "ast":
        files = [u.file for u in units if u.file is not None]
        return ast_engine.detect_ss6_local_state(files, cfg) if files else []
    texts = [(u.path, u.text) for u in units if u.text is not None]
    return pattern_engine.pattern_ss6(texts, cfg) if texts else []


__all__ = [
    "ConfigError",
    "DetectorConfig",
    "ENGINES",
    "ScanUnit",
    "SmellFinding",
    "ast_engine",
    "config_from_dict",
    "detect_all",
    "detect_file",
    "load_config_file",
    "pattern_engine",
    "unit_for",
]
