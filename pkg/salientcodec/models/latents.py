"""
File: latents.py
Description: value objects passed between the codec graph, the entropy
module and the training engine
"""

from __future__ import absolute_import

from collections import OrderedDict
from typing import Dict, Optional, Tuple

from salientcodec.core.tensor import Tensor
from salientcodec.utils.errors import DimensionError, MalformedLatentsError

import numpy as np

CODING_ORDER = (3, 2, 1)


class FeatureMap():
    """N x C x h x w tensor tagged with the latent level whose grid it lives on"""

    def __init__(self, tensor: Tensor, level: int):
        self.tensor = tensor
        self.level = level

    @classmethod
    def checked(cls, tensor: Tensor, level: int, grid: Tuple[int, int]) -> 'FeatureMap':
        if tuple(tensor.shape[2:]) != tuple(grid):
            raise DimensionError(
                f'level {level} features must be {grid[0]}x{grid[1]}, got {tensor.shape}')
        return cls(tensor, level)

    @property
    def shape(self):
        return self.tensor.shape


class LevelLatents():
    """
        Everything one latent level carries: y (pre-mask), y_masked, y_hat
        (noisy in train mode, integer in infer mode), hyper-latents z / z_hat,
        Gaussian parameters mu / sigma and the binary level mask on the y grid.
        Decoded sets only hold y_hat, z_hat, mu, sigma and mask.
    """

    def __init__(self, level: int, y_hat: Tensor, z_hat: Tensor, mu: Tensor, sigma: Tensor,
                 mask: np.ndarray, y: Tensor = None, y_masked: Tensor = None, z: Tensor = None):
        self.level = level
        self.y = y
        self.y_masked = y_masked
        self.y_hat = y_hat
        self.z = z
        self.z_hat = z_hat
        self.mu = mu
        self.sigma = sigma
        self.mask = mask

    @property
    def grid(self) -> Tuple[int, int]:
        return tuple(self.y_hat.shape[2:])

    def coded_symbol_count(self) -> int:
        """latent symbols that reach the range coder"""
        return int(self.mask.sum()) * self.y_hat.shape[0] * self.y_hat.shape[1]


class LatentSet():
    def __init__(self, levels: Dict[int, LevelLatents], mask, mode: str,
                 image_size: Tuple[int, int], original_size: Optional[Tuple[int, int]] = None,
                 lambda_id: int = 0):
        self.levels = OrderedDict((n, levels[n]) for n in CODING_ORDER if n in levels)
        self.mask = mask
        self.mode = mode
        self.image_size = tuple(image_size)
        self.original_size = tuple(original_size) if original_size is not None else self.image_size
        self.lambda_id = lambda_id

    def __getitem__(self, level: int) -> LevelLatents:
        try:
            return self.levels[level]
        except KeyError:
            raise MalformedLatentsError(f'latent level {level} is missing')

    def __iter__(self):
        return iter(self.levels.values())

    def check_complete(self):
        missing = [n for n in CODING_ORDER if n not in self.levels or self.levels[n].y_hat is None]
        if missing:
            raise MalformedLatentsError(f'quantized latents missing for levels {missing}')

    def symbols(self, level: int) -> Tuple[np.ndarray, np.ndarray]:
        """(y_hat, z_hat) of one level as int64 arrays"""
        lv = self[level]
        return (np.asarray(lv.y_hat.data).astype(np.int64),
                np.asarray(lv.z_hat.data).astype(np.int64))

    def same_symbols(self, other: 'LatentSet') -> bool:
        for n in CODING_ORDER:
            a_y, a_z = self.symbols(n)
            b_y, b_z = other.symbols(n)
            if not (np.array_equal(a_y, b_y) and np.array_equal(a_z, b_z)):
                return False
        return True

    def coded_symbol_count(self) -> int:
        return sum(lv.coded_symbol_count() for lv in self)


class ReconstructionResult():
    def __init__(self, x_hat: Tensor, level_bits: Dict = None, cell_bits: np.ndarray = None,
                 original_size: Tuple[int, int] = None):
        self.x_hat = x_hat
        self.level_bits = level_bits or OrderedDict()
        self.cell_bits = cell_bits
        self.original_size = original_size

    @property
    def total_bits(self) -> float:
        return float(sum(self.level_bits.values()))

    def image(self, index: int = 0) -> np.ndarray:
        """H x W x 3 array in [0, 1], cropped to the original size"""
        img = np.transpose(self.x_hat.data[index], (1, 2, 0))
        if self.original_size is not None:
            img = img[:self.original_size[0], :self.original_size[1]]
        return np.clip(img, 0.0, 1.0)


class LossBreakdown():
    """total = distortion + lmbda * rate, rate in bits per pixel"""

    def __init__(self, distortion: Tensor, rate: Tensor, lmbda: float, terms: Dict[str, float] = None):
        self.distortion = distortion
        self.rate = rate
        self.lmbda = lmbda
        self.total = distortion + rate * lmbda
        self.terms = OrderedDict(terms or {})

    def as_dict(self) -> Dict[str, float]:
        out = OrderedDict([('loss_total', float(self.total.data)),
                           ('distortion', float(self.distortion.data)),
                           ('rate', float(self.rate.data))])
        out.update(self.terms)
        return out

    def __repr__(self):
        return (f'LossBreakdown(total={float(self.total.data):.6f}, '
                f'D={float(self.distortion.data):.6f}, R={float(self.rate.data):.6f}, '
                f'lambda={self.lmbda})')
