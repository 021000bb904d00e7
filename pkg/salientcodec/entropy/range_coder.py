"""
File: range_coder.py
Description: carry-less range coder (Subbotin scheme) on 64-bit registers
with 16-bit renormalisation, plus an adaptive frequency model.

Frequency tables are cumulative integer arrays ``cdf`` of length nsym + 1 with
cdf[0] = 0, strictly increasing, and cdf[-1] = total <= 2**16.
"""

from __future__ import absolute_import

from typing import Sequence

from salientcodec.utils.errors import CorruptionError

import numpy as np

WORD_BITS = 16
TOP = 1 << 48
BOT = 1 << 32
MASK64 = (1 << 64) - 1
MAX_TOTAL = 1 << 16
FLUSH_WORDS = 4


def check_cdf(cdf: Sequence[int]):
    cdf = np.asarray(cdf, dtype=np.int64)
    if cdf.ndim != 1 or len(cdf) < 2:
        raise ValueError('a frequency table needs at least one symbol')
    if cdf[0] != 0 or np.any(np.diff(cdf) <= 0):
        raise ValueError('cumulative frequencies must start at 0 and strictly increase')
    if cdf[-1] > MAX_TOTAL:
        raise ValueError(f'frequency total {cdf[-1]} exceeds {MAX_TOTAL}')
    return cdf


class RangeEncoder():
    def __init__(self):
        self.low = 0
        self.range = MASK64
        self.out = bytearray()
        self.n_symbols = 0

    def _normalize(self):
        while True:
            if (self.low ^ (self.low + self.range)) >= TOP:
                if self.range >= BOT:
                    break
                self.range = (-self.low) & (BOT - 1)
            self.out += (self.low >> 48).to_bytes(2, 'little')
            self.low = (self.low << WORD_BITS) & MASK64
            self.range = (self.range << WORD_BITS) & MASK64

    def encode(self, cum_freq: int, freq: int, total: int):
        self.range //= total
        self.low += cum_freq * self.range
        self.range *= freq
        self.n_symbols += 1
        self._normalize()

    def encode_symbol(self, symbol: int, cdf):
        self.encode(int(cdf[symbol]), int(cdf[symbol + 1] - cdf[symbol]), int(cdf[-1]))

    def encode_uniform(self, value: int, n: int):
        if not 0 <= value < n:
            raise ValueError(f'value {value} outside the uniform alphabet of size {n}')
        self.encode(value, 1, n)

    def finish(self) -> bytes:
        """flush the low register; a stream without symbols stays empty"""
        if self.n_symbols == 0:
            return bytes(self.out)
        for _ in range(FLUSH_WORDS):
            self.out += (self.low >> 48).to_bytes(2, 'little')
            self.low = (self.low << WORD_BITS) & MASK64
        return bytes(self.out)


class RangeDecoder():
    def __init__(self, data: bytes, base_offset: int = 0):
        self.data = bytes(data)
        self.pos = 0
        self.base_offset = base_offset
        self.low = 0
        self.range = MASK64
        self.code = 0
        self._started = False

    def _read_word(self) -> int:
        if self.pos + 2 > len(self.data):
            raise CorruptionError('range coded segment ends early',
                                  self.base_offset + self.pos)
        word = int.from_bytes(self.data[self.pos:self.pos + 2], 'little')
        self.pos += 2
        return word

    def _start(self):
        for _ in range(FLUSH_WORDS):
            self.code = ((self.code << WORD_BITS) | self._read_word()) & MASK64
        self._started = True

    def _normalize(self):
        while True:
            if (self.low ^ (self.low + self.range)) >= TOP:
                if self.range >= BOT:
                    break
                self.range = (-self.low) & (BOT - 1)
            self.code = ((self.code << WORD_BITS) | self._read_word()) & MASK64
            self.low = (self.low << WORD_BITS) & MASK64
            self.range = (self.range << WORD_BITS) & MASK64

    def target(self, total: int) -> int:
        if not self._started:
            self._start()
        self.range //= total
        value = ((self.code - self.low) & MASK64) // self.range
        if value >= total:
            raise CorruptionError('range coder state is inconsistent',
                                  self.base_offset + self.pos)
        return value

    def consume(self, cum_freq: int, freq: int):
        self.low += cum_freq * self.range
        self.range *= freq
        self._normalize()

    def decode_symbol(self, cdf) -> int:
        value = self.target(int(cdf[-1]))
        symbol = int(np.searchsorted(cdf, value, side='right')) - 1
        self.consume(int(cdf[symbol]), int(cdf[symbol + 1] - cdf[symbol]))
        return symbol

    def decode_uniform(self, n: int) -> int:
        value = self.target(n)
        self.consume(value, 1)
        return value

    @property
    def bytes_consumed(self) -> int:
        return self.pos


class AdaptiveFrequencyModel():
    """
        Order-0 adaptive model: every count starts at 1, a coded symbol gains
        ``increment`` and all counts are halved once the total passes ``limit``.
    """

    def __init__(self, n_symbols: int, increment: int = 32, limit: int = MAX_TOTAL):
        if n_symbols < 1:
            raise ValueError('n_symbols must be positive')
        if limit > MAX_TOTAL:
            raise ValueError(f'limit cannot exceed {MAX_TOTAL}')
        self.freq = np.ones(n_symbols, dtype=np.int64)
        self.increment = increment
        self.limit = limit

    @property
    def cdf(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.freq)])

    def update(self, symbol: int):
        self.freq[symbol] += self.increment
        if self.freq.sum() > self.limit:
            self.freq = np.maximum(1, self.freq // 2)

    def encode(self, encoder: RangeEncoder, symbol: int):
        encoder.encode_symbol(symbol, self.cdf)
        self.update(symbol)

    def decode(self, decoder: RangeDecoder) -> int:
        symbol = decoder.decode_symbol(self.cdf)
        self.update(symbol)
        return symbol
