import pytest

from perspectivekit import config


@pytest.fixture(autouse=True)
def clean_config():
    config.reset()
    yield
    config.reset()


@pytest.fixture
def cache_dir(tmp_path):
    return str(tmp_path / 'cache')
