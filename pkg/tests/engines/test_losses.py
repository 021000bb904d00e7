from salientcodec.core.metrics import ms_ssim, reduce_mse
from salientcodec.core.tensor import Tensor
from salientcodec.engines.losses import (HVSLoss, MS_SSIM_FACTOR, distortion_hvs, loss_hvs,
                                         loss_vcm, ms_ssim_levels)
from salientcodec.engines.optimizer import Adam
from salientcodec.masks.saliency_mask import SaliencyMask
from salientcodec.models.codec import image_to_tensor
from salientcodec.models.proxy import ProxySegNet

import pytest
import warnings
import numpy as np


@pytest.mark.parametrize('size, levels', [((512, 1024), 5), ((176, 200), 5), ((64, 128), 3),
                                          ((16, 16), 1)])
def test_ms_ssim_levels(size, levels):
    assert ms_ssim_levels(*size) == levels


def test_identical_images_have_no_distortion(rng):
    x = Tensor(rng.uniform(0, 1, (1, 3, 176, 176)))
    assert distortion_hvs(x, x).item() == pytest.approx(0.0, abs=1e-12)


def test_hvs_distortion_combines_mse_and_ms_ssim(rng):
    x = Tensor(rng.uniform(0, 1, (1, 3, 176, 176)))
    y = Tensor(np.clip(x.data + rng.normal(0, 0.05, x.shape), 0, 1))
    expected = reduce_mse(x, y).item() + MS_SSIM_FACTOR * (1.0 - ms_ssim(x, y).item())
    assert distortion_hvs(x, y).item() == pytest.approx(expected, rel=1e-12)
    value, terms = HVSLoss()(x, y)
    assert value.item() == pytest.approx(expected, rel=1e-12)
    assert terms['loss_mse'] == pytest.approx(reduce_mse(x, y).item())


def test_small_inputs_use_fewer_scales(rng):
    x = Tensor(rng.uniform(0, 1, (1, 3, 64, 128)))
    with pytest.warns(UserWarning):
        assert distortion_hvs(x, x).item() == pytest.approx(0.0, abs=1e-12)


def test_loss_hvs_identity(small_codec, rng):
    x = image_to_tensor(rng.uniform(0, 1, (64, 128, 3)))
    m = SaliencyMask([[1, 3]], (64, 128))
    with pytest.warns(UserWarning):
        loss = loss_hvs(small_codec, x, m, 0.05, random_state=1)
    total = loss.distortion.item() + 0.05 * loss.rate.item()
    assert loss.total.item() == pytest.approx(total)
    assert set(loss.as_dict()) >= {'loss_total', 'loss_mse', 'loss_msssim', 'bpp_estimate'}


def test_loss_vcm_trains_the_codec_only(small_codec, rng):
    x = image_to_tensor(rng.uniform(0, 1, (64, 64, 3)))
    m = SaliencyMask([[2]], (64, 64))
    labels = rng.randint(0, 4, size=(1, 64, 64))
    proxy = ProxySegNet(4, random_state=0)
    with pytest.raises(ValueError):
        loss_vcm(small_codec, x, m, 0.01, proxy, labels)
    proxy.freeze()
    loss = loss_vcm(small_codec, x, m, 0.01, proxy, labels, random_state=0)
    assert loss.distortion.item() > 0
    assert 'loss_task' in loss.terms
    loss.total.backward()
    assert all(t.grad is None for _, t in proxy.store.items())
    assert any(t.grad is not None and np.any(t.grad) for _, t in small_codec.store.subset('dec'))
    assert any(t.grad is not None and np.any(t.grad) for _, t in small_codec.store.subset('enc'))


@pytest.mark.parametrize('size', [(176, 176), (64, 128)])
def test_hvs_loss_matches_distortion_hvs(rng, size):
    x = Tensor(rng.uniform(0, 1, (1, 3) + size))
    y = Tensor(np.clip(x.data + rng.normal(0, 0.1, x.shape), 0, 1))
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', UserWarning)
        value, terms = HVSLoss()(x, y)
        expected = distortion_hvs(x, y)
    assert value.item() == expected.item()
    assert expected.item() == pytest.approx(terms['loss_mse'] + MS_SSIM_FACTOR * terms['loss_msssim'])


@pytest.mark.slow
def test_task_loss_falls_while_training_the_codec(small_codec, rng):
    x = image_to_tensor(rng.uniform(0, 1, (64, 64, 3)))
    m = SaliencyMask([[1]], (64, 64))
    labels = rng.randint(0, 4, size=(1, 64, 64))
    proxy = ProxySegNet(4, random_state=0)
    proxy.freeze()
    optimizer = Adam(small_codec.store, lr=1e-3)
    task = []
    for step in range(200):
        optimizer.zero_grad()
        loss = loss_vcm(small_codec, x, m, 0.001, proxy, labels, random_state=step)
        loss.total.backward()
        optimizer.step()
        task.append(loss.terms['loss_task'])
    assert np.mean(task[-20:]) < np.mean(task[:20])
