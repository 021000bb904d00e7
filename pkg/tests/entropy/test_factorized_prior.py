from salientcodec.core.parameters import ParameterStore
from salientcodec.core.tensor import Tensor
from salientcodec.entropy.factorized_prior import FactorizedPrior
from salientcodec.entropy.range_coder import MAX_TOTAL, RangeDecoder, RangeEncoder

import pytest
import numpy as np


@pytest.fixture
def prior(rng):
    store = ParameterStore()
    return FactorizedPrior(store, 'prior1', 3, random_state=rng)


def test_parameters_are_registered(prior):
    names = prior.store.names()
    assert 'prior1.matrix0' in names and 'prior1.factor2' in names and 'prior1.bias3' in names
    assert prior.store['prior1.matrix1'].shape == (3, 3, 3)


def test_cdf_is_monotone_with_proper_limits(prior, rng):
    for name, t in prior.store.items():
        t.data = t.data + rng.normal(0, 0.5, t.shape)
    grid = np.broadcast_to(np.linspace(-60, 60, 1201), (3, 1201))
    cdf = prior.cdf(grid)
    assert np.all(np.diff(cdf, axis=1) >= 0.0)
    limits = prior.cdf(np.broadcast_to([-1e4, 1e4], (3, 2)))
    assert np.all(limits[:, 0] < 1e-6)
    assert np.all(limits[:, 1] > 1.0 - 1e-6)


def test_likelihood_shape_and_range(prior, rng):
    z = Tensor(np.round(rng.normal(0, 2, (2, 3, 4, 5))))
    p = prior.likelihood(z)
    assert p.shape == z.shape
    assert np.all(p.data > 0) and np.all(p.data <= 1)


def test_likelihood_rejects_wrong_channel_count(prior):
    with pytest.raises(ValueError):
        prior.likelihood(Tensor(np.zeros((1, 2, 1, 1))))


def test_tables_are_valid(prior):
    tables = prior.tables()
    assert tables.shape == (3, 2 * prior.tail + 3)
    assert np.all(np.diff(tables, axis=1) > 0)
    assert np.all(tables[:, -1] <= MAX_TOTAL)


def test_round_trip_with_outliers(prior, rng):
    symbols = np.round(rng.normal(0, 3, (3, 4, 6))).astype(np.int64)
    symbols[1, 0, 0] = 200
    symbols[2, 3, 5] = -90
    encoder = RangeEncoder()
    prior.encode(encoder, symbols)
    decoded = prior.decode(RangeDecoder(encoder.finish()), symbols.shape)
    np.testing.assert_array_equal(decoded, symbols)
