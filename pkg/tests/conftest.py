import numpy as np
import pytest

from srgm_swarm import ModelKind, Params, generate_synthetic


def bowl(p):
    return (p.a - 500.0) ** 2 + (p.b - 0.5) ** 2


@pytest.fixture
def go_truth():
    return Params(500.0, 0.05)


@pytest.fixture
def go_data(go_truth):
    # deterministic G-O curve on t = 1..100
    return generate_synthetic(ModelKind.GO_EXPONENTIAL, go_truth, np.arange(1, 101), name="go-synth")


@pytest.fixture
def small_data():
    return generate_synthetic(ModelKind.GO_EXPONENTIAL, Params(100.0, 0.1), np.arange(1, 21), name="small")
