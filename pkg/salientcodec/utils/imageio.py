"""
File: imageio.py
Description: 8-bit PNG / PPM reading and writing through Pillow
"""

from __future__ import absolute_import

from PIL import Image

from salientcodec.utils.errors import InputError
from salientcodec.utils.fileio import atomic_write

import numpy as np


def read_image(path) -> np.ndarray:
    """H x W x 3 float64 array in [0, 1]"""
    try:
        with Image.open(path) as img:
            if img.mode not in ('RGB', 'L', 'P', 'RGBA'):
                raise InputError(f'{path}: expected an 8-bit image, got mode {img.mode}')
            data = np.asarray(img.convert('RGB'), dtype=np.uint8)
    except FileNotFoundError:
        raise InputError(f'{path}: no such image file')
    except (OSError, SyntaxError) as e:
        raise InputError(f'{path}: unreadable image ({e})')
    return data.astype(np.float64) / 255.0


def to_uint8(image: np.ndarray) -> np.ndarray:
    return np.clip(np.floor(np.asarray(image) * 255.0 + 0.5), 0, 255).astype(np.uint8)


def write_image(path, image: np.ndarray):
    fmt = 'PPM' if str(path).lower().endswith(('.ppm', '.pnm')) else 'PNG'
    with atomic_write(path, 'wb') as f:
        Image.fromarray(to_uint8(image), mode='RGB').save(f, format=fmt)
