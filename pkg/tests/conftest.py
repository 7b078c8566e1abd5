import pytest

from islhmm.hmm import load_bundled_model
from islhmm.isl import load_config


@pytest.fixture(scope="session")
def config():
    return load_config()


@pytest.fixture(scope="session")
def demo_model():
    return load_bundled_model()
