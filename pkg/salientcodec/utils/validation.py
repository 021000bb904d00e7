"""
File: validation.py
Description: argument checking helpers shared by every subpackage
"""

from __future__ import absolute_import

from salientcodec.utils.errors import DimensionError, PaddingRequiredError

import numpy as np


def check_random_state(seed):
    """Turn seed into a np.random.RandomState instance
    Parameters
    ----------
    seed : None, int or instance of RandomState
        If seed is None, return a fresh RandomState.
        If seed is an int, return a new RandomState instance seeded with seed.
        If seed is already a RandomState instance, return it.
        Otherwise raise ValueError.
    """
    if seed is None or seed is np.random:
        return np.random.RandomState()
    if isinstance(seed, (int, np.integer)):
        return np.random.RandomState(int(seed))
    if isinstance(seed, np.random.RandomState):
        return seed
    raise ValueError('%r cannot be used to seed a numpy.random.RandomState'
                     ' instance' % seed)


def check_same_shape(a, b, what='operands'):
    a_shape, b_shape = tuple(np.shape(a)), tuple(np.shape(b))
    if a_shape != b_shape:
        raise DimensionError(
            f'{what} must have identical shapes, got {a_shape} and {b_shape}')
    return a_shape


def check_image(image):
    """check_image.
        Turn an H x W x 3 raster into a float ndarray in [0, 1]

    Args:
        image: array-like H x W x 3
    """
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[2] != 3:
        raise DimensionError(
            f'image has to be H x W x 3, got shape {image.shape}')
    if np.issubdtype(image.dtype, np.integer):
        image = image.astype(np.float64) / 255.0
    else:
        image = image.astype(np.float64)
    if image.size and (image.min() < 0.0 or image.max() > 1.0):
        raise ValueError('image values have to lie in [0, 1]')
    return image


def check_multiple_of(height, width, multiple=64):
    if height % multiple != 0 or width % multiple != 0:
        raise PaddingRequiredError(
            f'{height}x{width} is not a multiple of {multiple}; '
            f'pad the input with pad_to_multiple first')
    return height, width
