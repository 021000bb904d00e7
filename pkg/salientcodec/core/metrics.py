"""
File: metrics.py
Description: differentiable distortion metrics, mean squared error and
multi-scale structural similarity (MS-SSIM) on NCHW tensors in [0, 1].
"""

from __future__ import absolute_import

from typing import Sequence

from salientcodec.core import functional as F
from salientcodec.core.tensor import Tensor, as_tensor
from salientcodec.utils.errors import DimensionError, ImageTooSmallError

import warnings
import numpy as np

# canonical five-scale exponents of the multi-scale SSIM
MS_SSIM_WEIGHTS = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K = (0.01, 0.03)

_POSITIVE_FLOOR = 1e-12


def reduce_mse(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.shape != b.shape:
        raise DimensionError(f'reduce_mse needs equal shapes, got {a.shape} and {b.shape}')
    return F.mean(F.square(F.sub(a, b)))


def gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    coords = np.arange(size, dtype=np.float64) - size // 2
    g = np.exp(-(coords ** 2) / (2.0 * sigma ** 2))
    return g / g.sum()


def _gaussian_filter(x: Tensor, window: np.ndarray) -> Tensor:
    for axis in (2, 3):
        if x.shape[axis] >= len(window):
            x = F.correlate1d_valid(x, window, axis=axis)
        else:
            warnings.warn(
                f'skipping Gaussian smoothing along axis {axis} of extent {x.shape[axis]}: '
                f'shorter than the {len(window)}-tap window', UserWarning)
    return x


def _ssim_terms(x: Tensor, y: Tensor, window: np.ndarray, data_range: float, k=SSIM_K):
    c1 = (k[0] * data_range) ** 2
    c2 = (k[1] * data_range) ** 2

    mu1 = _gaussian_filter(x, window)
    mu2 = _gaussian_filter(y, window)
    mu1_sq, mu2_sq, mu1_mu2 = F.square(mu1), F.square(mu2), F.mul(mu1, mu2)
    sigma1_sq = F.sub(_gaussian_filter(F.mul(x, x), window), mu1_sq)
    sigma2_sq = F.sub(_gaussian_filter(F.mul(y, y), window), mu2_sq)
    sigma12 = F.sub(_gaussian_filter(F.mul(x, y), window), mu1_mu2)

    cs_map = F.div(F.add(F.mul(sigma12, 2.0), c2), F.add(F.add(sigma1_sq, sigma2_sq), c2))
    luminance = F.div(F.add(F.mul(mu1_mu2, 2.0), c1), F.add(F.add(mu1_sq, mu2_sq), c1))
    ssim_map = F.mul(luminance, cs_map)

    # per image and channel
    return F.mean(ssim_map, axis=(2, 3)), F.mean(cs_map, axis=(2, 3))


def resolve_ms_ssim_weights(levels: int = None, weights: Sequence[float] = None) -> np.ndarray:
    if weights is not None:
        weights = np.asarray(weights, dtype=np.float64)
        if levels is not None and levels != len(weights):
            raise ValueError(f'levels={levels} disagrees with {len(weights)} weights')
    else:
        levels = len(MS_SSIM_WEIGHTS) if levels is None else levels
        if not 1 <= levels <= len(MS_SSIM_WEIGHTS):
            raise ValueError(f'levels must lie in [1, {len(MS_SSIM_WEIGHTS)}], got {levels}')
        weights = np.asarray(MS_SSIM_WEIGHTS[:levels], dtype=np.float64)
    if np.any(weights < 0) or weights.sum() <= 0:
        raise ValueError('MS-SSIM weights must be non-negative with a positive sum')
    return weights / weights.sum()


def ms_ssim(a, b, data_range: float = 1.0, levels: int = None,
            weights: Sequence[float] = None, window_size: int = SSIM_WINDOW,
            sigma: float = SSIM_SIGMA) -> Tensor:
    """ms_ssim.
        Five-scale MS-SSIM with the canonical scale exponents. Passing levels
        (or explicit weights) uses fewer scales and renormalises the exponents,
        which is what small images need.

    Args:
        a: NCHW tensor
        b: NCHW tensor of the same shape
        data_range: dynamic range of the values
        levels: number of dyadic scales
        weights: per-scale exponents
    """
    a, b = as_tensor(a), as_tensor(b)
    if a.shape != b.shape:
        raise DimensionError(f'ms_ssim needs equal shapes, got {a.shape} and {b.shape}')
    if a.ndim != 4:
        raise DimensionError(f'ms_ssim expects NCHW tensors, got shape {a.shape}')
    weights = resolve_ms_ssim_weights(levels, weights)
    levels = len(weights)
    min_side = (window_size - 1) * 2 ** (levels - 1)
    if min(a.shape[2], a.shape[3]) < min_side:
        raise ImageTooSmallError(
            f'image of {a.shape[2]}x{a.shape[3]} is too small for {levels}-scale MS-SSIM '
            f'(needs a side of at least {min_side}); pass a smaller levels=')

    window = gaussian_window(window_size, sigma)
    factors = []
    for i in range(levels):
        ssim_pc, cs = _ssim_terms(a, b, window, data_range)
        if i < levels - 1:
            factors.append(cs)
            a, b = F.avg_pool2(a), F.avg_pool2(b)
    factors.append(ssim_pc)

    value = None
    for factor, weight in zip(factors, weights):
        term = F.power(F.clamp_min(factor, _POSITIVE_FLOOR), float(weight))
        value = term if value is None else F.mul(value, term)
    return F.mean(value)


def psnr(a, b, data_range: float = 1.0) -> float:
    """peak signal-to-noise ratio in dB for reporting; infinite on identical inputs"""
    a = a.data if isinstance(a, Tensor) else np.asarray(a)
    b = b.data if isinstance(b, Tensor) else np.asarray(b)
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return float('inf')
    return float(10.0 * np.log10(data_range ** 2 / mse))
