"""Text-pattern smell detectors working on raw file content.

This engine deliberately avoids the parser: each smell is matched by a
regular expression over the file text, the way a quick corpus study would
do it. It trades precision for robustness (it works on files the parser
cannot make sense of) and its findings are labelled ``engine="pattern"`` so
reports never mix the two methodologies silently.

Comments are masked out before matching (replaced by spaces, offsets
preserved) so commented-out code does not trigger findings. The region
detector can optionally scan comment text too via
``ss5_pattern_scan_comments``.
"""

from __future__ import annotations

import re

from ..catalog import SmellId
from ..hcl import SourceSpan
from .ast_engine import normalize_region
from .config import LOG_GROUP_TYPES, SIZE_ATTRS, DetectorConfig
from .findings import SmellFinding

_RESOURCE_DECL_RE = re.compile(r'^[ \t]*resource[ \t]+"([^"\n]+)"', re.MULTILINE)
_TERRAFORM_BLOCK_RE = re.compile(r"^[ \t]*terraform[ \t]*\{", re.MULTILINE)
_BACKEND_RE = re.compile(r'\bbackend[ \t]+"([^"\n]+)"')


def mask_comments(text: str) -> str:
    """Replace comment characters with spaces, preserving offsets.

    Quote-aware: ``#`` inside a string literal is kept. Newlines inside
    block comments survive so line numbers stay correct.
    """
    out = list(text)
    i = 0
    n = len(text)
    in_string = False
    while i < n:
        ch = text[i]
        if ch == "\\" and in_string:
            i += 2
            continue
        if ch == '"':
            in_string = not in_string
            i += 1
            continue
        if in_string:
            if ch == "\n":  # unterminated string; stop treating it as one
                in_string = False
            i += 1
            continue
        if ch == "#" or text[i : i + 2] == "//":
            while i < n and text[i] != "\n":
                out[i] = " "
                i += 1
            continue
        if text[i : i + 2] == "/*":
            while i < n and text[i : i + 2] != "*/":
                if text[i] != "\n":
                    out[i] = " "
                i += 1
            if i < n:
                out[i] = out[i + 1] = " "
                i += 2
            continue
        i += 1
    return "".join(out)


class _LineIndex:
    """Offset to 1-based (line, column) conversion."""

    def __init__(self, text: str) -> None:
        self.starts = [0]
        for i, ch in enumerate(text):
            if ch == "\n":
                self.starts.append(i + 1)
        self.length = len(text)
        self.last_line = len(self.starts)
        self.last_col = self.length - self.starts[-1] + 1

    def position(self, offset: int) -> tuple[int, int]:
        lo, hi = 0, len(self.starts) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.starts[mid] <= offset:
                lo = mid
            else:
                hi = mid - 1
        return lo + 1, offset - self.starts[lo] + 1

    def span(self, path: str, start: int, end: int) -> SourceSpan:
        sl, sc = self.position(start)
        el, ec = self.position(end)
        return SourceSpan(path, sl, sc, el, ec)

    def file_span(self, path: str) -> SourceSpan:
        return SourceSpan(path, 1, 1, self.last_line, self.last_col)


def _alternation(names: frozenset[str] | set[str]) -> str:
    return "|".join(re.escape(name) for name in sorted(names))


def _has_autoscaler_text(masked: str, cfg: DetectorConfig) -> bool:
    return re.search(rf"\b(?:{_alternation(cfg.ss2_autoscaler_types)})\b", masked) is not None


def pattern_ss1(path: str, text: str, cfg: DetectorConfig) -> list[SmellFinding]:
    masked = mask_comments(text)
    if _has_autoscaler_text(masked, cfg):
        return []
    index = _LineIndex(text)
    all_sizes = frozenset().union(*cfg.ss1_large_sizes.values())
    findings = []
    size_re = re.compile(
        rf'\b(?:{"|".join(SIZE_ATTRS)})[ \t]*=[ \t]*"([^"\n]+)"'
    )
    for m in size_re.finditer(masked):
        literal = m.group(1)
        short = literal.rsplit("/", 1)[-1]
        if literal in all_sizes or short in all_sizes:
            findings.append(
                SmellFinding(
                    SmellId.SS1,
                    path,
                    index.span(path, m.start(), m.end()),
                    literal,
                    "pattern",
                    f'instance size "{literal}" matches the oversized catalog '
                    "and no autoscaler token appears in the file",
                )
            )
    return findings


def pattern_ss2(path: str, text: str, cfg: DetectorConfig) -> list[SmellFinding]:
    masked = mask_comments(text)
    if _has_autoscaler_text(masked, cfg):
        return []
    if not re.search(rf"\b(?:{_alternation(cfg.ss2_compute_types)})\b", masked):
        return []
    index = _LineIndex(text)
    findings = []
    for m in re.finditer(r"\bcount[ \t]*=[ \t]*(\d+)", masked):
        count = int(m.group(1))
        if count >= cfg.ss2_fixed_count_min:
            findings.append(
                SmellFinding(
                    SmellId.SS2,
                    path,
                    index.span(path, m.start(), m.end()),
                    f"count={count}",
                    "pattern",
                    f"fixed count of {count} in a file declaring compute "
                    "resources and no autoscaler token",
                )
            )
    return findings


def pattern_ss3(path: str, text: str, cfg: DetectorConfig) -> list[SmellFinding]:
    masked = mask_comments(text)
    if re.search(r"\blifecycle[ \t]*\{", masked):
        return []
    index = _LineIndex(text)
    required = cfg.ss3_lifecycle_required_types
    findings = []
    for m in _RESOURCE_DECL_RE.finditer(masked):
        rtype = m.group(1)
        if rtype in required:
            findings.append(
                SmellFinding(
                    SmellId.SS3,
                    path,
                    index.span(path, m.start(), m.end()),
                    rtype,
                    "pattern",
                    f"{rtype} declared in a file with no lifecycle block",
                )
            )
    return findings


def pattern_ss4(path: str, text: str, cfg: DetectorConfig) -> list[SmellFinding]:
    masked = mask_comments(text)
    index = _LineIndex(text)
    retention_re = re.compile(r"\b(retention_in_days|retention_days)[ \t]*=[ \t]*(\d+)")
    findings = []
    saw_retention = False
    for m in retention_re.finditer(masked):
        saw_retention = True
        days = int(m.group(2))
        if days > cfg.ss4_retention_max_days:
            findings.append(
                SmellFinding(
                    SmellId.SS4,
                    path,
                    index.span(path, m.start(), m.end()),
                    str(days),
                    "pattern",
                    f"log retention of {days} days exceeds the configured "
                    f"maximum of {cfg.ss4_retention_max_days}",
                )
            )
    if not saw_retention and cfg.ss4_flag_missing_retention:
        if re.search(rf"\b(?:{_alternation(set(LOG_GROUP_TYPES))})\b", masked):
            findings.append(
                SmellFinding(
                    SmellId.SS4,
                    path,
                    index.file_span(path),
                    "unset",
                    "pattern",
                    "log resources declared but no retention attribute found",
                )
            )
    return findings


def pattern_ss5(path: str, text: str, cfg: DetectorConfig) -> list[SmellFinding]:
    scan_text = text if cfg.ss5_pattern_scan_comments else mask_comments(text)
    attr_re = re.compile(
        rf'\b({_alternation(cfg.ss5_region_attrs)})[ \t]*=[ \t]*"([^"\n]+)"'
    )
    classes: list[str] = []
    for m in attr_re.finditer(scan_text):
        region = normalize_region(m.group(1), m.group(2))
        if region not in classes:
            classes.append(region)
    if len(classes) < 2:
        return []
    index = _LineIndex(text)
    return [
        SmellFinding(
            SmellId.SS5,
            path,
            index.file_span(path),
            f"{classes[0]} != {classes[1]}",
            "pattern",
            f"file places resources in {len(classes)} distinct regions "
            f"({', '.join(classes)})",
        )
    ]


def pattern_ss6(
    files: list[tuple[str, str]], cfg: DetectorConfig
) -> list[SmellFinding]:
    """Directory-scoped remote-backend check over (path, text) pairs."""
    ordered = sorted(files, key=lambda item: item[0])
    masked = {path: mask_comments(text) for path, text in ordered}
    for path, _ in ordered:
        for m in _BACKEND_RE.finditer(masked[path]):
            if m.group(1) != "local":
                return []

    findings = []
    with_terraform = [
        (path, text) for path, text in ordered if _TERRAFORM_BLOCK_RE.search(masked[path])
    ]
    if not with_terraform:
        path, text = ordered[0]
        index = _LineIndex(text)
        return [
            SmellFinding(
                SmellId.SS6,
                path,
                index.file_span(path),
                "unset",
                "pattern",
                "no remote state backend token found in this directory",
            )
        ]
    for path, text in with_terraform:
        index = _LineIndex(text)
        local = next(
            (m for m in _BACKEND_RE.finditer(masked[path]) if m.group(1) == "local"),
            None,
        )
        if local is not None:
            findings.append(
                SmellFinding(
                    SmellId.SS6,
                    path,
                    index.span(path, local.start(), local.end()),
                    "local",
                    "pattern",
                    'state is kept in an explicit "local" backend',
                )
            )
        else:
            m = _TERRAFORM_BLOCK_RE.search(masked[path])
            assert m is not None
            findings.append(
                SmellFinding(
                    SmellId.SS6,
                    path,
                    index.span(path, m.start(), m.end()),
                    "unset",
                    "pattern",
                    "terraform block with no remote state backend token",
                )
            )
    return findings


def pattern_ss7(path: str, text: str, cfg: DetectorConfig) -> list[SmellFinding]:
    masked = mask_comments(text)
    count = len(_RESOURCE_DECL_RE.findall(masked))
    if count < cfg.ss7_max_resources_per_file:
        return []
    index = _LineIndex(text)
    return [
        SmellFinding(
            SmellId.SS7,
            path,
            index.file_span(path),
            str(count),
            "pattern",
            f"{count} resource declarations in a single file (threshold "
            f"{cfg.ss7_max_resources_per_file})",
        )
    ]


PER_FILE_PATTERNS = (
    pattern_ss1,
    pattern_ss2,
    pattern_ss3,
    pattern_ss4,
    pattern_ss5,
    pattern_ss7,
)
