from salientcodec.core.tensor import Tensor
from salientcodec.models.proxy import ProxySegNet, TaskLoss, one_hot
from salientcodec.utils.errors import DimensionError

import pytest
import numpy as np


@pytest.fixture
def proxy():
    return ProxySegNet(4, random_state=0)


def test_logits_shape(proxy, rng):
    x = Tensor(rng.uniform(0, 1, (2, 3, 32, 48)))
    assert proxy.logits(x).shape == (2, 4, 32, 48)
    assert proxy.predict(x).shape == (2, 32, 48)
    with pytest.raises(DimensionError):
        proxy.logits(Tensor(np.zeros((1, 3, 30, 32))))


def test_frozen_proxy_passes_gradients_through(proxy, rng):
    proxy.freeze()
    x_hat = Tensor(rng.uniform(0, 1, (1, 3, 16, 16)), requires_grad=True)
    labels = rng.randint(0, 4, size=(1, 16, 16))
    loss = proxy.task_loss(x_hat, labels)
    assert loss.item() >= 0.0
    loss.backward()
    assert x_hat.grad is not None and np.any(x_hat.grad)
    assert all(t.grad is None for _, t in proxy.store.items())
    assert 'frozen' in repr(proxy)


def test_task_loss_of_uniform_logits(rng):
    proxy = ProxySegNet(3, random_state=0)
    for _, t in proxy.store.items():
        t.data = np.zeros_like(t.data)
    labels = rng.randint(0, 3, size=(1, 8, 8))
    loss = proxy.task_loss(Tensor(rng.uniform(0, 1, (1, 3, 8, 8))), labels)
    assert loss.item() == pytest.approx(np.log(3.0))


def test_one_hot():
    target = one_hot(np.array([[[0, 2]]]), 3)
    assert target.shape == (1, 3, 1, 2)
    np.testing.assert_array_equal(target[0, :, 0, 1], [0, 0, 1])
    with pytest.raises(ValueError):
        one_hot(np.array([[[3]]]), 3)


def test_class_iou_bounds(proxy, rng):
    x = Tensor(rng.uniform(0, 1, (1, 3, 16, 16)))
    labels = proxy.predict(x)
    iou, support = proxy.class_iou(x, labels)
    assert np.all(iou == 100.0)
    assert support.sum() == 256


def test_task_loss_with_hvs_term(proxy, rng):
    proxy.freeze()
    x = Tensor(rng.uniform(0, 1, (1, 3, 16, 16)))
    labels = np.zeros((1, 16, 16), dtype=int)

    def constant(a, b):
        return Tensor(2.0)

    plain, terms = TaskLoss(proxy, labels)(x, x)
    mixed, mixed_terms = TaskLoss(proxy, labels, 0.5, constant)(x, x)
    assert mixed.item() == pytest.approx(plain.item() + 1.0)
    assert mixed_terms['loss_hvs'] == 2.0
    with pytest.raises(ValueError):
        TaskLoss(proxy, labels, 0.5)
    with pytest.raises(ValueError):
        ProxySegNet(1)


def test_pixel_loss_averages_to_the_task_loss(proxy, rng):
    x = Tensor(rng.uniform(0, 1, (2, 3, 32, 48)))
    labels = rng.randint(0, 4, size=(2, 32, 48))
    per_pixel = proxy.pixel_loss(x, labels)
    assert per_pixel.shape == (2, 32, 48)
    assert np.all(per_pixel >= 0)
    assert per_pixel.mean() == pytest.approx(proxy.task_loss(x, labels).item())
    with pytest.raises(DimensionError):
        proxy.pixel_loss(x, labels[:, :16])
