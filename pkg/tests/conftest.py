import numpy as np
import pytest

from ltcnd import Sample


def samples_of(times, values):
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    return [Sample.of(t, x) for t, x in zip(times, values)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
