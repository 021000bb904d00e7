"""
File: saliency_mask.py
Description: block grid assigning every 64x64-pixel cell to one latent level
"""

from __future__ import absolute_import

from typing import Tuple

from salientcodec.utils.errors import DimensionError

import math
import numpy as np

CELL_SIZE = 64
LEVELS = (1, 2, 3)

# one y_n element covers 16 * 2^(n-1) pixels per side
_ELEMENTS_PER_CELL = {1: 4, 2: 2, 3: 1}


def grid_dims(height: int, width: int, cell_size: int = CELL_SIZE) -> Tuple[int, int]:
    return math.ceil(height / cell_size), math.ceil(width / cell_size)


def elements_per_cell(level: int) -> int:
    if level not in _ELEMENTS_PER_CELL:
        raise ValueError(f'level must be one of {LEVELS}, got {level}')
    return _ELEMENTS_PER_CELL[level]


class SaliencyMask():
    def __init__(self, grid, image_size: Tuple[int, int] = None, cell_size: int = CELL_SIZE):
        grid = np.array(grid, dtype=np.uint8)
        if grid.ndim != 2 or grid.size == 0:
            raise DimensionError(f'mask grid has to be a non-empty 2-d array, got shape {grid.shape}')
        if not np.all(np.isin(grid, LEVELS)):
            bad = np.unique(grid[~np.isin(grid, LEVELS)])
            raise ValueError(f'mask levels must be in {LEVELS}, found {bad.tolist()}')
        if image_size is not None:
            expected = grid_dims(*image_size, cell_size=cell_size)
            if expected != grid.shape:
                raise DimensionError(
                    f'a {image_size[0]}x{image_size[1]} image needs a {expected} grid, got {grid.shape}')
        self.grid = grid
        self.cell_size = cell_size
        self.image_size = tuple(image_size) if image_size is not None else \
            (grid.shape[0] * cell_size, grid.shape[1] * cell_size)

    @classmethod
    def full(cls, image_size: Tuple[int, int], level: int) -> 'SaliencyMask':
        if level not in LEVELS:
            raise ValueError(f'level must be one of {LEVELS}, got {level}')
        return cls(np.full(grid_dims(*image_size), level, dtype=np.uint8), image_size)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.grid.shape

    def count(self, level: int) -> int:
        return int(np.count_nonzero(self.grid == level))

    def fraction(self, level: int) -> float:
        return self.count(level) / self.grid.size

    def cells(self, level: int) -> np.ndarray:
        return self.grid == level

    def with_cell(self, row: int, col: int, level: int) -> 'SaliencyMask':
        grid = self.grid.copy()
        grid[row, col] = level
        return SaliencyMask(grid, self.image_size, self.cell_size)

    def __eq__(self, other):
        return isinstance(other, SaliencyMask) and np.array_equal(self.grid, other.grid)

    def __repr__(self):
        counts = ', '.join(f'L{n}={self.count(n)}' for n in LEVELS)
        return f'SaliencyMask({self.shape[0]}x{self.shape[1]}, {counts})'

    def to_ascii(self) -> str:
        return '\n'.join(''.join(str(int(v)) for v in row) for row in self.grid) + '\n'

    @classmethod
    def from_ascii(cls, text: str, image_size: Tuple[int, int] = None) -> 'SaliencyMask':
        rows = [line.strip() for line in text.splitlines() if line.strip()]
        if not rows or len(set(len(r) for r in rows)) != 1:
            raise ValueError('mask dump has to be a rectangle of digits 1/2/3')
        try:
            grid = [[int(ch) for ch in row] for row in rows]
        except ValueError:
            raise ValueError('mask dump has to be a rectangle of digits 1/2/3')
        return cls(grid, image_size)


def project_mask_to_level(m: SaliencyMask, level: int) -> np.ndarray:
    """binary map on the y_level grid: 1 where the covering cell is assigned to level"""
    factor = elements_per_cell(level)
    return np.kron(m.cells(level).astype(np.uint8), np.ones((factor, factor), dtype=np.uint8))
