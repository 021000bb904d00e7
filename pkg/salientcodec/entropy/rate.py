"""
File: rate.py
Description: rate estimation, R = sum of -log2 p over the coded symbols.
Latent positions outside their level's mask contribute nothing; every
hyper-latent position is counted.
"""

from __future__ import absolute_import

from collections import OrderedDict
from typing import Dict

from salientcodec.core import functional as F
from salientcodec.core.parameters import ParameterStore
from salientcodec.core.tensor import Tensor, as_tensor
from salientcodec.entropy.factorized_prior import FactorizedPrior
from salientcodec.entropy.gaussian_conditional import GaussianConditional, SCALE_BOUND
from salientcodec.masks.saliency_mask import elements_per_cell
from salientcodec.utils.typing import SegmentKey

import warnings
import numpy as np

LIKELIHOOD_FLOOR = 1e-9
CODING_ORDER = (3, 2, 1)

_clamp_events = 0


def likelihood_clamp_count() -> int:
    """likelihoods clamped at LIKELIHOOD_FLOOR since the last reset"""
    return _clamp_events


def reset_likelihood_clamp_count():
    global _clamp_events
    _clamp_events = 0


def symbol_bits(likelihood, mask=None) -> Tensor:
    """
        per-symbol code length -log2 p with p floored at LIKELIHOOD_FLOOR;
        mask is a binary (h, w) map broadcast over batch and channels
    """
    global _clamp_events
    likelihood = as_tensor(likelihood)
    low = ~(likelihood.data >= LIKELIHOOD_FLOOR)
    if mask is not None:
        mask = np.asarray(mask, dtype=likelihood.dtype)
        low = low & (mask > 0)
    clamped = int(np.count_nonzero(low))
    if clamped:
        _clamp_events += clamped
        warnings.warn(f'{clamped} likelihoods below {LIKELIHOOD_FLOOR} were clamped',
                      RuntimeWarning)
    bits = F.neg(F.log2(F.clamp_min(likelihood, LIKELIHOOD_FLOOR)))
    return bits if mask is None else F.mul(bits, mask)


def likelihood_bits(likelihood, mask=None) -> Tensor:
    """total bits over the unmasked symbols"""
    return F.sum(symbol_bits(likelihood, mask))


class EntropyModels():
    """Gaussian conditional for y and one factorized prior per level for z"""

    def __init__(self, store: ParameterStore, hyper_channels: int, name: str = 'prior',
                 scale_bound: float = SCALE_BOUND, random_state=None):
        self.gaussian = GaussianConditional(scale_bound)
        self.factorized: Dict[int, FactorizedPrior] = OrderedDict()
        for n in CODING_ORDER:
            self.factorized[n] = FactorizedPrior(store, f'{name}{n}', hyper_channels,
                                                 random_state=random_state)


class RateEstimate():
    def __init__(self, total: Tensor, per_level: Dict[SegmentKey, float],
                 cell_bits: np.ndarray, clamped: int):
        self.total = total
        self.per_level = per_level
        self.cell_bits = cell_bits
        self.clamped = clamped

    @property
    def bits(self) -> float:
        return float(self.total.data)

    def bpp(self, n_pixels: int) -> float:
        return self.bits / n_pixels

    def __repr__(self):
        return f'RateEstimate(bits={self.bits:.1f}, clamped={self.clamped})'


def _block_sum(bits: np.ndarray, factor: int) -> np.ndarray:
    """(N, h, w) element bits -> (N, h / factor, w / factor) cell bits"""
    n, h, w = bits.shape
    return bits.reshape(n, h // factor, factor, w // factor, factor).sum(axis=(2, 4))


def spread_hyper_bits(z_bits: np.ndarray, height: int, width: int) -> np.ndarray:
    """
        Distribute per-element z bits over the 2 x 2 y elements each z element
        covers; edge elements whose footprint is cropped spread over fewer cells.
    """
    zh, zw = z_bits.shape[1:]
    rows = np.minimum(2 * np.arange(zh) + 2, height) - 2 * np.arange(zh)
    cols = np.minimum(2 * np.arange(zw) + 2, width) - 2 * np.arange(zw)
    weights = z_bits / np.outer(rows, cols)
    ones = np.ones((2, 2))
    return np.stack([np.kron(wt, ones)[:height, :width] for wt in weights])


def estimate_rate(latents, priors: EntropyModels) -> RateEstimate:
    """estimate_rate.
        Differentiable total in bits plus a per-level breakdown and a
        per-image map of bits per 64 x 64 cell.

    Args:
        latents: LatentSet with y_hat, mu, sigma, z_hat and the level masks
        priors: EntropyModels
    """
    clamps_before = _clamp_events
    total = None
    per_level = OrderedDict()
    cell_bits = None
    for n in CODING_ORDER:
        level = latents[n]
        z_elem = symbol_bits(priors.factorized[n].likelihood(level.z_hat))
        y_elem = symbol_bits(priors.gaussian.likelihood(level.y_hat, level.mu, level.sigma),
                             level.mask)
        z_total, y_total = F.sum(z_elem), F.sum(y_elem)
        per_level[('z', n)] = float(z_total.data)
        per_level[('y', n)] = float(y_total.data)
        level_total = F.add(z_total, y_total)
        total = level_total if total is None else F.add(total, level_total)

        h, w = y_elem.shape[2:]
        element_map = y_elem.data.sum(axis=1) + spread_hyper_bits(z_elem.data.sum(axis=1), h, w)
        cells = _block_sum(element_map, elements_per_cell(n))
        cell_bits = cells if cell_bits is None else cell_bits + cells
    return RateEstimate(total, per_level, cell_bits, _clamp_events - clamps_before)
