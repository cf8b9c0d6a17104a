import numpy as np
import pytest

from affectstage import corpus
from affectstage.emotion import init_network


@pytest.fixture(scope="session")
def demo_script():
    return corpus.demo_script()


@pytest.fixture(scope="session")
def demo_net(demo_script):
    # an untrained but deterministic classifier is enough for engine plumbing
    return init_network(demo_script.states, hidden=8, seed=42)


@pytest.fixture(scope="session")
def demo_audio():
    return corpus.demo_clip()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
