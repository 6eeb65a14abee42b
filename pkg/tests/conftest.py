from __future__ import annotations

from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


def fixture_corpus_files() -> list[Path]:
    """Every .tf file in the checked-in fixture corpus."""
    return sorted(FIXTURES.rglob("*.tf"))
