"""
File: mask_signal.py
Description: mask side information, two bits of raw information per cell,
range coded with an adaptive three-symbol model in raster order.
"""

from __future__ import absolute_import

from typing import Tuple

from salientcodec.entropy.range_coder import AdaptiveFrequencyModel, RangeDecoder, RangeEncoder
from salientcodec.masks.saliency_mask import SaliencyMask, grid_dims

import numpy as np

RAW_BITS_PER_CELL = 2


def signal_mask(m: SaliencyMask) -> bytes:
    encoder = RangeEncoder()
    model = AdaptiveFrequencyModel(3)
    for level in m.grid.ravel():
        model.encode(encoder, int(level) - 1)
    return encoder.finish()


def read_mask_signal(data: bytes, image_size: Tuple[int, int], base_offset: int = 0) -> SaliencyMask:
    rows, cols = grid_dims(*image_size)
    decoder = RangeDecoder(data, base_offset)
    model = AdaptiveFrequencyModel(3)
    grid = np.zeros(rows * cols, dtype=np.uint8)
    for i in range(len(grid)):
        grid[i] = model.decode(decoder) + 1
    return SaliencyMask(grid.reshape(rows, cols), image_size)


def raw_mask_bits(m: SaliencyMask) -> int:
    """upper bound of the mask cost before entropy coding"""
    return RAW_BITS_PER_CELL * m.grid.size
