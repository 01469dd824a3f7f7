import numpy as np
import pytest

from support import SAMPLE_ANNOTATIONS


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def sample_annotation_file(tmp_path):
    path = tmp_path / "annotations.tsv"
    path.write_text(SAMPLE_ANNOTATIONS, encoding="utf-8")
    return path
