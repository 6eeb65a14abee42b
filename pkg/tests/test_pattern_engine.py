from __future__ import annotations

from tfsustain.detectors import DetectorConfig, detect_all, unit_for
from tfsustain.detectors.pattern_engine import (
    mask_comments,
    pattern_ss1,
    pattern_ss2,
    pattern_ss4,
    pattern_ss5,
    pattern_ss6,
    pattern_ss7,
)

from conftest import FIXTURES

CFG = DetectorConfig()


def test_mask_comments_preserves_offsets_and_strings():
    text = 'a = "keep # this" # drop this\nb = 2 // gone\n/* multi\nline */ c = 3\n'
    masked = mask_comments(text)
    assert len(masked) == len(text)
    assert masked.count("\n") == text.count("\n")
    assert '"keep # this"' in masked
    assert "drop this" not in masked
    assert "gone" not in masked
    assert "multi" not in masked
    assert "c = 3" in masked


def test_pattern_ss1_matches_size_literal():
    text = (FIXTURES / "samples" / "ss1.tf").read_text()
    findings = pattern_ss1("ss1.tf", text, CFG)
    assert len(findings) == 1 and findings[0].engine == "pattern"
    assert findings[0].evidence == "Standard_D16s_v3"


def test_pattern_ss2_needs_compute_type_in_file():
    no_compute = 'resource "aws_sns_topic" "t" {\n  count = 9\n}\n'
    assert pattern_ss2("x.tf", no_compute, CFG) == []
    with_compute = (FIXTURES / "samples" / "ss2.tf").read_text()
    assert len(pattern_ss2("x.tf", with_compute, CFG)) == 1


def test_pattern_ss2_commented_count_does_not_fire():
    text = 'resource "aws_instance" "a" {\n  # count = 9\n  ami = "x"\n}\n'
    assert pattern_ss2("x.tf", text, CFG) == []


def test_pattern_ss4_missing_retention_is_file_level():
    text = 'resource "aws_cloudwatch_log_group" "g" {\n  name = "g"\n}\n'
    findings = pattern_ss4("x.tf", text, CFG)
    assert len(findings) == 1 and findings[0].evidence == "unset"


def test_pattern_ss5_region_literals_from_comments_only_with_flag():
    text = (
        'resource "google_compute_instance" "a" {\n'
        '  zone = "us-west1-a"\n'
        '  # replica lives in region = "europe-west1"\n'
        "}\n"
    )
    assert pattern_ss5("x.tf", text, CFG) == []
    scanning = DetectorConfig(ss5_pattern_scan_comments=True)
    findings = pattern_ss5("x.tf", text, scanning)
    assert len(findings) == 1
    assert findings[0].evidence == "us-west1 != europe-west1"


def test_pattern_ss6_local_backend():
    text = (FIXTURES / "mutants" / "ss6_local_backend" / "main.tf").read_text()
    findings = pattern_ss6([("main.tf", text)], CFG)
    assert len(findings) == 1 and findings[0].evidence == "local"


def test_pattern_ss6_remote_backend_clean():
    text = (FIXTURES / "samples" / "ss6.tf").read_text()
    assert pattern_ss6([("ss6.tf", text)], CFG) == []


def test_pattern_ss7_counts_resource_declarations():
    text = (FIXTURES / "mutants" / "ss7_extended" / "main.tf").read_text()
    findings = pattern_ss7("x.tf", text, CFG)
    assert len(findings) == 1 and findings[0].evidence == "12"


def test_pattern_engine_contained_in_ast_engine_on_fixtures():
    """On the curated fixtures the text patterns never out-claim the AST."""
    units = []
    for rel in ["samples", "samples_extended", "clean", "smelly"]:
        for p in sorted((FIXTURES / rel).glob("*.tf")):
            units.append((rel, unit_for(f"{rel}/{p.name}", p.read_text())))
    grouped: dict[str, list] = {}
    for rel, unit in units:
        grouped.setdefault(rel, []).append(unit)
    ast_found = {
        (f.path, f.smell.name)
        for f in detect_all(grouped, CFG, "ast")
        if f.smell.name in ("SS1", "SS2", "SS4", "SS7")
    }
    pattern_found = {
        (f.path, f.smell.name)
        for f in detect_all(grouped, CFG, "pattern")
        if f.smell.name in ("SS1", "SS2", "SS4", "SS7")
    }
    assert pattern_found <= ast_found
    assert pattern_found  # not vacuous


def test_pattern_engine_works_on_unparseable_text():
    text = 'resource "aws_instance" %%% {\n  count = 5\n  instance_type = "m5.4xlarge"\n'
    findings = pattern_ss2("x.tf", text, CFG)
    assert len(findings) == 1
