import pytest

from extractor_support import build_tiny_model


@pytest.fixture(scope="session")
def model_dir(tmp_path_factory):
    return build_tiny_model(tmp_path_factory.mktemp("tiny-mlm"))
