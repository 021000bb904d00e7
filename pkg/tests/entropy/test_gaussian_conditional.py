from scipy.special import ndtr

from salientcodec.core.tensor import Tensor
from salientcodec.entropy.gaussian_conditional import (GaussianConditional, quantize_symbols,
                                                       round_half_away, SCALE_BOUND)
from salientcodec.entropy.range_coder import RangeDecoder, RangeEncoder
from salientcodec.entropy.rate import symbol_bits

import pytest
import numpy as np


def test_rounding_ties_away_from_zero():
    np.testing.assert_array_equal(round_half_away([0.4, -1.5, 1.5, 2.5, -0.5]),
                                  [0.0, -2.0, 2.0, 3.0, -1.0])
    np.testing.assert_array_equal(quantize_symbols([300.2, -999.0]), [255, -255])


def test_symbol_zero_under_unit_gaussian():
    model = GaussianConditional()
    p = model.likelihood(Tensor([0.0]), Tensor([0.0]), Tensor([1.0])).item()
    assert p == pytest.approx(ndtr(0.5) - ndtr(-0.5), abs=1e-12)
    bits = symbol_bits(Tensor([p])).item()
    assert bits == pytest.approx(-np.log2(ndtr(0.5) - ndtr(-0.5)), abs=1e-12)
    assert bits == pytest.approx(1.3863, abs=2e-3)


def test_uniform_prior_costs_eight_bits_per_symbol():
    bits = symbol_bits(Tensor(np.full(100, 1.0 / 256)))
    assert float(np.sum(bits.data)) == pytest.approx(800.0)


def test_likelihood_in_unit_interval(rng):
    model = GaussianConditional()
    y = Tensor(np.round(rng.normal(0, 20, 500)))
    mu = Tensor(rng.normal(0, 2, 500))
    sigma = Tensor(rng.uniform(0.0, 10.0, 500))
    p = model.likelihood(y, mu, sigma).data
    assert np.all(p >= 0.0) and np.all(p <= 1.0)


def test_scale_is_bounded():
    model = GaussianConditional()
    tiny = model.likelihood(Tensor([0.0]), Tensor([0.0]), Tensor([1e-6])).item()
    bounded = model.likelihood(Tensor([0.0]), Tensor([0.0]), Tensor([SCALE_BOUND])).item()
    assert tiny == bounded


def test_round_trip_with_escapes(rng):
    model = GaussianConditional()
    mu = rng.normal(0, 3, 400)
    sigma = rng.uniform(0.05, 5.0, 400)
    symbols = quantize_symbols(mu + sigma * rng.standard_normal(400))
    symbols[::37] = 250
    symbols[5] = -255
    encoder = RangeEncoder()
    model.encode(encoder, symbols, mu, sigma)
    decoded = model.decode(RangeDecoder(encoder.finish()), mu, sigma)
    np.testing.assert_array_equal(decoded, symbols)


def test_coded_size_close_to_shannon_entropy():
    rng = np.random.RandomState(3)
    sigma, n = 8.0, 10000
    symbols = quantize_symbols(rng.normal(0.0, sigma, n))
    support = np.arange(-200, 201)
    p = ndtr((support + 0.5) / sigma) - ndtr((support - 0.5) / sigma)
    p = p[p > 0]
    entropy_bits = -n * np.sum(p * np.log2(p))

    model = GaussianConditional()
    encoder = RangeEncoder()
    model.encode(encoder, symbols, np.zeros(n), np.full(n, sigma))
    coded_bits = 8 * len(encoder.finish())
    assert abs(coded_bits - entropy_bits) < 0.01 * entropy_bits
