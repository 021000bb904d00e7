from salientcodec.masks.saliency_mask import (CELL_SIZE, SaliencyMask, elements_per_cell, grid_dims,
                                              project_mask_to_level)
from salientcodec.utils.errors import DimensionError

import pytest
import numpy as np


def test_grid_dims_round_up():
    assert grid_dims(512, 1024) == (8, 16)
    assert grid_dims(100, 65) == (2, 2)


def test_levels_are_validated():
    with pytest.raises(ValueError):
        SaliencyMask([[1, 4]])
    with pytest.raises(DimensionError):
        SaliencyMask([[1, 2]], image_size=(128, 128))


def test_counts_and_cells():
    m = SaliencyMask([[1, 2, 3], [3, 3, 1]])
    assert (m.count(1), m.count(2), m.count(3)) == (2, 1, 3)
    assert m.fraction(3) == 0.5
    np.testing.assert_array_equal(m.cells(1), [[True, False, False], [False, False, True]])
    assert m.with_cell(0, 1, 1).count(1) == 3
    assert m.count(1) == 2


def test_ascii_round_trip():
    m = SaliencyMask([[1, 2], [3, 3]], image_size=(100, 128))
    text = m.to_ascii()
    assert text == '12\n33\n'
    assert SaliencyMask.from_ascii(text, (100, 128)) == m
    with pytest.raises(ValueError):
        SaliencyMask.from_ascii('12\n3\n')


def test_level_three_projection_is_the_cell_map(rng):
    grid = rng.randint(1, 4, size=(8, 16))
    m = SaliencyMask(grid)
    np.testing.assert_array_equal(project_mask_to_level(m, 3), grid == 3)


def test_projection_partitions_the_image(rng):
    grid = rng.randint(1, 4, size=(3, 5))
    m = SaliencyMask(grid)
    height, width = 3 * CELL_SIZE, 5 * CELL_SIZE
    covered = 0
    for n in (1, 2, 3):
        side = CELL_SIZE // elements_per_cell(n)
        covered += int(project_mask_to_level(m, n).sum()) * side * side
    assert covered == height * width


def test_projection_matches_pixel_assignment(rng):
    grid = rng.randint(1, 4, size=(4, 6))
    m = SaliencyMask(grid)
    pixel_levels = np.kron(grid, np.ones((CELL_SIZE, CELL_SIZE), dtype=int))
    for n in (1, 2, 3):
        side = CELL_SIZE // elements_per_cell(n)
        element_map = project_mask_to_level(m, n)
        assert element_map.shape == (4 * elements_per_cell(n), 6 * elements_per_cell(n))
        on_pixels = np.kron(element_map, np.ones((side, side), dtype=int))
        np.testing.assert_array_equal(on_pixels == 1, pixel_levels == n)


def test_full_mask():
    m = SaliencyMask.full((130, 64), 2)
    assert m.shape == (3, 1)
    assert m.count(2) == 3
    with pytest.raises(ValueError):
        SaliencyMask.full((64, 64), 0)
