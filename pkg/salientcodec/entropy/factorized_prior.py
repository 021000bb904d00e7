"""
File: factorized_prior.py
Description: per-channel learned cumulative density for the hyper-latents z.

Each channel owns a small monotone network 1 -> 3 -> 3 -> 3 -> 1. Matrices pass
through softplus so they stay positive and the tanh gates are bounded by 1,
which keeps the cumulative logits non-decreasing in the input.
"""

from __future__ import absolute_import

from typing import Sequence

from salientcodec.core import functional as F
from salientcodec.core.parameters import ParameterStore
from salientcodec.core.tensor import Tensor, as_tensor, no_grad
from salientcodec.entropy.gaussian_conditional import (ALPHABET_MIN, ALPHABET_SIZE,
                                                       probabilities_to_cdf)
from salientcodec.entropy.range_coder import RangeDecoder, RangeEncoder
from salientcodec.utils.validation import check_random_state

import numpy as np

DEFAULT_FILTERS = (3, 3, 3)
TABLE_TAIL = 64


class FactorizedPrior():
    def __init__(self, store: ParameterStore, name: str, channels: int,
                 filters: Sequence[int] = DEFAULT_FILTERS, init_scale: float = 10.0,
                 tail: int = TABLE_TAIL, random_state=None):
        random_state = check_random_state(random_state)
        self.store = store
        self.name = name
        self.channels = channels
        self.filters = tuple(filters)
        self.tail = tail
        widths = (1,) + self.filters + (1,)
        scale = init_scale ** (1.0 / (len(self.filters) + 1))
        for i in range(len(self.filters) + 1):
            init = np.log(np.expm1(1.0 / scale / widths[i + 1]))
            store.add(f'{name}.matrix{i}',
                      Tensor(np.full((channels, widths[i + 1], widths[i]), init)))
            store.add(f'{name}.bias{i}',
                      Tensor(random_state.uniform(-0.5, 0.5, size=(channels, widths[i + 1], 1))))
            if i < len(self.filters):
                store.add(f'{name}.factor{i}', Tensor(np.zeros((channels, widths[i + 1], 1))))

    def _logits_cumulative(self, x: Tensor) -> Tensor:
        """x has shape (channels, 1, M)"""
        logits = x
        for i in range(len(self.filters) + 1):
            matrix = self.store[f'{self.name}.matrix{i}']
            logits = F.add(F.matmul(F.softplus(matrix), logits), self.store[f'{self.name}.bias{i}'])
            if i < len(self.filters):
                factor = self.store[f'{self.name}.factor{i}']
                logits = F.add(logits, F.mul(F.tanh(factor), F.tanh(logits)))
        return logits

    def _check_channels(self, shape):
        if len(shape) != 4 or shape[1] != self.channels:
            raise ValueError(
                f'{self.name} models {self.channels} channels, got a tensor of shape {shape}')

    def likelihood(self, z_hat) -> Tensor:
        """discretised likelihood of an NCHW tensor of (noisy or integer) values"""
        z_hat = as_tensor(z_hat)
        self._check_channels(z_hat.shape)
        n, c, h, w = z_hat.shape
        flat = F.reshape(F.transpose(z_hat, (1, 0, 2, 3)), (c, 1, n * h * w))
        lower = self._logits_cumulative(F.sub(flat, 0.5))
        upper = self._logits_cumulative(F.add(flat, 0.5))
        # reflect onto the side where the sigmoids are not saturated
        sign = np.where(lower.data + upper.data > 0, -1.0, 1.0)
        lik = F.abs(F.sub(F.sigmoid(F.mul(upper, sign)), F.sigmoid(F.mul(lower, sign))))
        return F.transpose(F.reshape(lik, (c, n, h, w)), (1, 0, 2, 3))

    def cdf(self, values) -> np.ndarray:
        """cumulative distribution per channel at values of shape (channels, M)"""
        values = np.asarray(values, dtype=np.float64)
        with no_grad():
            logits = self._logits_cumulative(Tensor(values[:, None, :]))
            return F.sigmoid(logits).data[:, 0, :]

    def tables(self) -> np.ndarray:
        """(channels, 2 * tail + 3) cumulative tables over [-tail, tail] plus escape"""
        support = np.arange(-self.tail, self.tail + 1, dtype=np.float64)
        grid = np.broadcast_to(support, (self.channels, len(support)))
        with no_grad():
            p = self.likelihood(Tensor(grid[None, :, :, None])).data
        p = p[0, :, :, 0]
        escape = np.clip(1.0 - p.sum(axis=1, keepdims=True), 0.0, None)
        return probabilities_to_cdf(np.concatenate([p, escape], axis=1))

    def encode(self, encoder: RangeEncoder, symbols: np.ndarray, tables: np.ndarray = None):
        """symbols: integer array (channels, h, w), coded channel by channel"""
        tables = self.tables() if tables is None else tables
        escape = tables.shape[1] - 2
        for c in range(symbols.shape[0]):
            for q in symbols[c].ravel():
                index = int(q) + self.tail
                if 0 <= index < escape:
                    encoder.encode_symbol(index, tables[c])
                else:
                    encoder.encode_symbol(escape, tables[c])
                    encoder.encode_uniform(int(q) - ALPHABET_MIN, ALPHABET_SIZE)

    def decode(self, decoder: RangeDecoder, shape, tables: np.ndarray = None) -> np.ndarray:
        tables = self.tables() if tables is None else tables
        escape = tables.shape[1] - 2
        channels, h, w = shape
        out = np.zeros((channels, h * w), dtype=np.int64)
        for c in range(channels):
            for i in range(h * w):
                index = decoder.decode_symbol(tables[c])
                if index == escape:
                    out[c, i] = decoder.decode_uniform(ALPHABET_SIZE) + ALPHABET_MIN
                else:
                    out[c, i] = index - self.tail
        return out.reshape(channels, h, w)
