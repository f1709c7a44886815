from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).resolve().parent


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return TESTS_DIR / "fixtures"


@pytest.fixture(scope="session")
def specs_dir() -> Path:
    return TESTS_DIR / "specs"


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return TESTS_DIR / "golden"
