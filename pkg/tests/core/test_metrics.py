from salientcodec.core.metrics import MS_SSIM_WEIGHTS, ms_ssim, psnr
from salientcodec.core.tensor import Tensor
from salientcodec.utils.errors import ImageTooSmallError

import pytest
import numpy as np


def reference_ms_ssim(a, b, size=11, sigma=1.5, k1=0.01, k2=0.03):
    """plain numpy MS-SSIM over (H, W) planes with even extents at every scale"""
    coords = np.arange(size) - size // 2
    g = np.exp(-coords ** 2 / (2 * sigma ** 2))
    g /= g.sum()
    c1, c2 = k1 ** 2, k2 ** 2

    def blur(img):
        rows = np.array([np.convolve(r, g, mode='valid') for r in img])
        return np.array([np.convolve(c, g, mode='valid') for c in rows.T]).T

    weights = np.array(MS_SSIM_WEIGHTS) / np.sum(MS_SSIM_WEIGHTS)
    value = 1.0
    for level, w in enumerate(weights):
        mu1, mu2 = blur(a), blur(b)
        s1 = blur(a * a) - mu1 ** 2
        s2 = blur(b * b) - mu2 ** 2
        s12 = blur(a * b) - mu1 * mu2
        cs = ((2 * s12 + c2) / (s1 + s2 + c2)).mean()
        if level == len(weights) - 1:
            lum = (2 * mu1 * mu2 + c1) / (mu1 ** 2 + mu2 ** 2 + c1)
            value *= max((lum * (2 * s12 + c2) / (s1 + s2 + c2)).mean(), 1e-12) ** w
        else:
            value *= max(cs, 1e-12) ** w
            h, wd = a.shape
            a = a.reshape(h // 2, 2, wd // 2, 2).mean(axis=(1, 3))
            b = b.reshape(h // 2, 2, wd // 2, 2).mean(axis=(1, 3))
    return value


@pytest.fixture
def pair(rng):
    gray = np.full((1, 1, 176, 176), 0.5)
    noisy = np.clip(gray + 0.1 * rng.standard_normal(gray.shape), 0.0, 1.0)
    return gray, noisy


def test_self_similarity(rng):
    x = rng.uniform(size=(1, 3, 176, 176))
    assert abs(ms_ssim(Tensor(x), Tensor(x)).item() - 1.0) < 1e-9


def test_symmetry(pair):
    a, b = pair
    assert abs(ms_ssim(Tensor(a), Tensor(b)).item() - ms_ssim(Tensor(b), Tensor(a)).item()) < 1e-9


def test_gray_against_noise_matches_reference(pair):
    a, b = pair
    value = ms_ssim(Tensor(a), Tensor(b)).item()
    assert value < 1.0
    assert abs(value - reference_ms_ssim(a[0, 0], b[0, 0])) < 1e-6


def test_small_image_needs_fewer_levels(rng):
    x = Tensor(rng.uniform(size=(1, 3, 64, 64)))
    with pytest.raises(ImageTooSmallError) as info:
        ms_ssim(x, x)
    assert 'levels' in str(info.value)
    assert abs(ms_ssim(x, x, levels=3).item() - 1.0) < 1e-9


def test_bad_level_count():
    x = Tensor(np.zeros((1, 1, 200, 200)))
    with pytest.raises(ValueError):
        ms_ssim(x, x, levels=6)


def test_psnr():
    a = np.zeros((4, 4))
    assert psnr(a, a) == float('inf')
    assert psnr(a, a + 0.1) == pytest.approx(20.0)
