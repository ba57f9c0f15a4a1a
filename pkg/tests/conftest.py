from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
EXAMPLES = REPO_ROOT / "docs" / "examples"


@pytest.fixture(scope="session")
def balanced_die_path() -> Path:
    return EXAMPLES / "balanced_die.json"


@pytest.fixture(scope="session")
def unbalanced_die_path() -> Path:
    return EXAMPLES / "unbalanced_die.json"


@pytest.fixture(scope="session")
def minimal_die_path() -> Path:
    return EXAMPLES / "minimal_die.json"


@pytest.fixture(scope="session")
def sample_dataset_path() -> Path:
    return EXAMPLES / "sample_dataset.csv"
