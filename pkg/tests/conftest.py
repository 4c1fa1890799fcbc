import pytest
from pathlib import Path

from zooscore.registry import load_registry

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures" / "registry"


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def benchmark_snapshot():
    return load_registry(FIXTURES).snapshot()
