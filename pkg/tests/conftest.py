import os
import random
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


def seed_from_env(offset: int = 0) -> int:
    return int(os.environ.get("DOTS_SEED", "0")) + offset


@pytest.fixture
def rng() -> random.Random:
    """Deterministic RNG for randomized tests; DOTS_SEED shifts the seed."""
    return random.Random(seed_from_env())


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
