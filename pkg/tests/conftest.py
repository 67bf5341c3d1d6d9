import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import helpers


@pytest.fixture(scope="session")
def p5_suite():
    return helpers.build_p5_suite()


@pytest.fixture(scope="session")
def near_transition():
    return helpers.build_near_transition(10)


@pytest.fixture(scope="session")
def diabetes():
    """Dataset or None; tests gated on it must provide a substitute path."""
    return helpers.load_diabetes_dataset()
