from pathlib import Path

import numpy as np
import pytest

FIXTURES = Path(__file__).parent / "fixtures"

# Published reference designs and their recorded CD2 values.
UD18X7_CD2 = 0.033972
UD27X13_CD2 = 0.198073


def load(name: str) -> np.ndarray:
    return np.loadtxt(FIXTURES / name, delimiter=",")


@pytest.fixture(scope="session")
def ud18x7() -> np.ndarray:
    return load("ud18x7.csv")


@pytest.fixture(scope="session")
def ud27x13() -> np.ndarray:
    return load("ud27x13.csv")


@pytest.fixture(scope="session")
def u9_levels() -> np.ndarray:
    return load("u9_levels.csv").astype(int)


@pytest.fixture(scope="session")
def u9_continuous() -> np.ndarray:
    return load("u9_continuous.csv")


@pytest.fixture(scope="session")
def u16_levels() -> np.ndarray:
    return load("u16_levels.csv").astype(int)


@pytest.fixture(scope="session")
def u16_continuous() -> np.ndarray:
    return load("u16_continuous.csv")
