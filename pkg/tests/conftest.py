import numpy as np
import pytest

from steerdist import tmss_standard


@pytest.fixture(scope="session")
def model_state():
    """The experiment's state: -4.2 dB squeezing, 7.3 dB antisqueezing."""
    return tmss_standard(-4.2, 7.3)


@pytest.fixture(scope="session")
def pure_state():
    """Pure counterpart used by the supplementary curves."""
    return tmss_standard(-4.2, 4.2)


@pytest.fixture()
def rng():
    return np.random.default_rng(20230817)
