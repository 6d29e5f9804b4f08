import numpy as np
import pytest

import fwfilter as fw


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def mg_series():
    """Standardized Mackey-Glass series at the default configuration."""
    return fw.standardize(fw.gen_mackey_glass(fw.MGParams(), 2400))


@pytest.fixture(scope="session")
def mg_data(mg_series):
    return fw.embed(mg_series, 10, 1)
