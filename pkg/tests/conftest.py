import numpy as np
import pytest

from leafscan.pipeline import PipelineConfig, run_pipeline
from leafscan.synthetic import SyntheticLeafParams, generate_leaf


@pytest.fixture(scope="session")
def lesion_leaf():
    """Default synthetic leaf: green disk on white with a 10% brown lesion."""
    params = SyntheticLeafParams()
    image, disk, lesion = generate_leaf(params)
    return image, disk, lesion


@pytest.fixture(scope="session")
def allgreen_leaf():
    params = SyntheticLeafParams(lesion_fraction=0.0)
    image, disk, lesion = generate_leaf(params)
    return image, disk, lesion


@pytest.fixture(scope="session")
def lesion_result(lesion_leaf):
    image, _, _ = lesion_leaf
    return run_pipeline(image, PipelineConfig())
