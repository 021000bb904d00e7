from salientcodec.core.tensor import Tensor
from salientcodec.entropy.rate import (LIKELIHOOD_FLOOR, likelihood_clamp_count,
                                       reset_likelihood_clamp_count, spread_hyper_bits, symbol_bits)
from salientcodec.masks.saliency_mask import SaliencyMask

import pytest
import numpy as np


def test_floor_counts_clamped_likelihoods():
    reset_likelihood_clamp_count()
    with pytest.warns(RuntimeWarning):
        bits = symbol_bits(Tensor([1e-12, 0.5]))
    assert likelihood_clamp_count() == 1
    assert bits.data[0] == pytest.approx(-np.log2(LIKELIHOOD_FLOOR))
    assert bits.data[1] == pytest.approx(1.0)


def test_masked_positions_cost_nothing():
    reset_likelihood_clamp_count()
    likelihood = Tensor(np.full((1, 2, 2, 2), 1e-12))
    with pytest.warns(RuntimeWarning):
        bits = symbol_bits(likelihood, np.array([[1, 0], [0, 0]]))
    assert likelihood_clamp_count() == 2
    assert np.count_nonzero(bits.data) == 2
    reset_likelihood_clamp_count()
    assert likelihood_clamp_count() == 0


def test_spread_preserves_totals(rng):
    z_bits = rng.uniform(0, 5, (1, 3, 4))
    for height, width in ((6, 8), (5, 7)):
        spread = spread_hyper_bits(z_bits, height, width)
        assert spread.shape == (1, height, width)
        assert spread.sum() == pytest.approx(z_bits.sum())


def test_level_masked_out_contributes_no_latent_bits(small_codec, textured_image):
    m = SaliencyMask.full((128, 192), 3)
    _, _, rate = small_codec.reconstruct(textured_image, m)
    assert rate.per_level[('y', 1)] == 0.0
    assert rate.per_level[('y', 2)] == 0.0
    assert rate.per_level[('y', 3)] > 0.0
    assert rate.per_level[('z', 1)] > 0.0


def test_cell_bits_add_up_to_total(small_codec, textured_image):
    m = SaliencyMask([[1, 2, 3], [3, 1, 2]], (128, 192))
    _, _, rate = small_codec.reconstruct(textured_image, m)
    assert rate.cell_bits.shape == (1, 2, 3)
    assert rate.cell_bits.sum() == pytest.approx(rate.bits, rel=1e-9)
    assert rate.bits == pytest.approx(sum(rate.per_level.values()), rel=1e-12)
