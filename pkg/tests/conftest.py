"""
File: conftest.py
Description: shared fixtures. Every test runs in reference (float64) mode;
tests marked slow only run when SALIENTCODEC_SLOW is set.
"""

from salientcodec.runtime import set_reference_mode
from salientcodec.models.codec import HierarchicalCodec
from salientcodec.models.config import ModelConfig

import os
import pytest
import numpy as np


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: long-running acceptance experiment')


def pytest_collection_modifyitems(config, items):
    if os.environ.get('SALIENTCODEC_SLOW'):
        return
    skip = pytest.mark.skip(reason='set SALIENTCODEC_SLOW=1 to run')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip)


@pytest.fixture(autouse=True)
def reference_precision():
    set_reference_mode(True)
    yield
    set_reference_mode(True)


@pytest.fixture
def rng():
    return np.random.RandomState(42)


@pytest.fixture
def small_codec():
    return HierarchicalCodec(ModelConfig.small(), random_state=0)


@pytest.fixture
def textured_image(rng):
    """128 x 192 image: smooth left half, noisy right half"""
    image = np.full((128, 192, 3), 0.5)
    image[:, 96:] = np.clip(0.5 + 0.25 * rng.standard_normal((128, 96, 3)), 0.0, 1.0)
    return image
