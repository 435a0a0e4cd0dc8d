from __future__ import annotations

import sys
from pathlib import Path

import pytest
from click.testing import CliRunner

sys.path.insert(0, str(Path(__file__).parent))  # for the oracles module

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "fixtures"


@pytest.fixture(scope="session")
def demo_manifest() -> Path:
    return FIXTURES / "demo" / "manifest.jsonl"


@pytest.fixture(scope="session")
def demo_config() -> Path:
    return FIXTURES / "demo" / "config.cfg"


@pytest.fixture(scope="session")
def books_manifest() -> Path:
    return FIXTURES / "books_manifest.jsonl"


@pytest.fixture(scope="session")
def books_config() -> Path:
    return FIXTURES / "books_config.cfg"


def run_cli(args: list[str]):
    """Invoke the CLI entry point in-process; nonzero exits stay captured,
    unexpected exceptions propagate."""
    from interpunct.cli import main

    return CliRunner().invoke(main, args, catch_exceptions=False)
