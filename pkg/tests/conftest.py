import numpy as np
import pytest

import qhmm


@pytest.fixture
def lambda1c():
    return qhmm.builtin("lambda1c")


@pytest.fixture
def lambda2c():
    return qhmm.builtin("lambda2c")


@pytest.fixture
def lambda3c():
    return qhmm.builtin("lambda3c")


@pytest.fixture
def lambda1q():
    return qhmm.builtin("lambda1q")


@pytest.fixture
def lambda_ex2_c():
    return qhmm.builtin("lambda_ex2_c")


@pytest.fixture
def lambda_ex2_q():
    return qhmm.builtin("lambda_ex2_q")


@pytest.fixture
def readout():
    return qhmm.example_measurement()


def random_complex(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
