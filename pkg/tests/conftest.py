import numpy as np
import pytest

from telegate import kernels


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # pay the one-time JIT cost outside any timed test body
    kernels.warmup()


@pytest.fixture
def rng():
    return np.random.default_rng(20240915)
