"""
File: gaussian_conditional.py
Description: mean-scale Gaussian model for the latents: differentiable
discretised likelihood for training and per-element integer frequency tables
for the range coder.
"""

from __future__ import absolute_import

from typing import Tuple

from scipy.special import ndtr

from salientcodec.core import functional as F
from salientcodec.core.tensor import Tensor, as_tensor
from salientcodec.entropy.range_coder import RangeDecoder, RangeEncoder, MAX_TOTAL

import math
import numpy as np

SCALE_BOUND = 0.04
ALPHABET_MIN = -255
ALPHABET_MAX = 255
ALPHABET_SIZE = ALPHABET_MAX - ALPHABET_MIN + 1
TAIL_SIGMAS = 7.0
MAX_HALF_WIDTH = 255


def round_half_away(x):
    """nearest integer, ties away from zero"""
    x = np.asarray(x)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def quantize_symbols(x) -> np.ndarray:
    """integer symbols on the coded alphabet"""
    return np.clip(round_half_away(x), ALPHABET_MIN, ALPHABET_MAX).astype(np.int64)


def probabilities_to_cdf(p: np.ndarray) -> np.ndarray:
    """
        Integer cumulative table from probabilities along the last axis. Every
        symbol keeps a count of at least 1 and the total stays <= 2**16.
    """
    nsym = p.shape[-1]
    freq = 1 + np.floor(np.clip(p, 0.0, 1.0) * (MAX_TOTAL - nsym)).astype(np.int64)
    zeros = np.zeros(p.shape[:-1] + (1,), dtype=np.int64)
    return np.concatenate([zeros, np.cumsum(freq, axis=-1)], axis=-1)


class GaussianConditional():
    def __init__(self, scale_bound: float = SCALE_BOUND, tail_sigmas: float = TAIL_SIGMAS):
        if scale_bound <= 0:
            raise ValueError(f'scale_bound must be positive, got {scale_bound}')
        self.scale_bound = scale_bound
        self.tail_sigmas = tail_sigmas

    def likelihood(self, y_hat, mu, sigma) -> Tensor:
        """P(q) = Phi((q - mu + 1/2) / sigma) - Phi((q - mu - 1/2) / sigma)"""
        y_hat, mu, sigma = as_tensor(y_hat), as_tensor(mu), as_tensor(sigma)
        sigma = F.clamp_min(sigma, self.scale_bound)
        # evaluate on the lower tail, where the CDF difference keeps its precision
        values = F.abs(F.sub(y_hat, mu))
        upper = F.normal_cdf(F.div(F.sub(0.5, values), sigma))
        lower = F.normal_cdf(F.div(F.sub(-0.5, values), sigma))
        return F.sub(upper, lower)

    def table(self, mu: float, sigma: float) -> Tuple[int, np.ndarray]:
        """(first symbol of the window, cdf over window + escape)"""
        sigma = max(float(sigma), self.scale_bound)
        center = int(round_half_away(mu))
        half = int(np.clip(math.ceil(sigma * self.tail_sigmas) + 1, 1, MAX_HALF_WIDTH))
        values = np.arange(center - half, center + half + 1, dtype=np.float64)
        distance = np.abs(values - mu)
        p = ndtr((0.5 - distance) / sigma) - ndtr((-0.5 - distance) / sigma)
        escape = max(0.0, 1.0 - p.sum())
        return center - half, probabilities_to_cdf(np.append(p, escape))

    def encode(self, encoder: RangeEncoder, symbols, mu, sigma):
        for q, m, s in zip(np.ravel(symbols), np.ravel(mu), np.ravel(sigma)):
            start, cdf = self.table(m, s)
            index = int(q) - start
            escape = len(cdf) - 2
            if 0 <= index < escape:
                encoder.encode_symbol(index, cdf)
            else:
                encoder.encode_symbol(escape, cdf)
                encoder.encode_uniform(int(q) - ALPHABET_MIN, ALPHABET_SIZE)

    def decode(self, decoder: RangeDecoder, mu, sigma) -> np.ndarray:
        mu, sigma = np.ravel(mu), np.ravel(sigma)
        out = np.zeros(len(mu), dtype=np.int64)
        for i in range(len(mu)):
            start, cdf = self.table(mu[i], sigma[i])
            index = decoder.decode_symbol(cdf)
            if index == len(cdf) - 2:
                out[i] = decoder.decode_uniform(ALPHABET_SIZE) + ALPHABET_MIN
            else:
                out[i] = start + index
        return out
