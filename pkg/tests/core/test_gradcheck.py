from salientcodec.core import functional as F
from salientcodec.core.gradcheck import grad_check
from salientcodec.core.layers import Conv2d, LayerSpec
from salientcodec.core.metrics import reduce_mse
from salientcodec.core.parameters import ParameterStore
from salientcodec.core.tensor import Tensor
from salientcodec.runtime import reference_mode

import pytest
import numpy as np


def test_single_conv_layer_with_mse(rng):
    store = ParameterStore()
    conv = Conv2d(store, 'c', 3, LayerSpec('conv', 4, 5, 2), rng)
    store['c.bias'].data[:] = rng.standard_normal(4)
    x = Tensor(rng.uniform(size=(2, 3, 8, 8)))
    target = rng.uniform(size=(2, 4, 4, 4))
    report = grad_check(lambda: reduce_mse(conv(x), target), store, random_state=0)
    assert report.n_checked == store.num_parameters()
    assert report.max_rel_error < 1e-4
    assert report.passed(1e-4)


def test_constant_loss_has_zero_gradients(rng):
    store = ParameterStore()
    conv = Conv2d(store, 'c', 1, LayerSpec('conv', 1, 3, 1), rng)
    x = Tensor(rng.uniform(size=(1, 1, 4, 4)))
    report = grad_check(lambda: F.add(F.mul(F.sum(conv(x)), 0.0), 1.0), store)
    np.testing.assert_array_equal(report.analytic, 0.0)
    np.testing.assert_array_equal(report.numeric, 0.0)
    assert report.max_rel_error == 0.0


def test_sample_cap(rng):
    w = Tensor(rng.standard_normal((40, 40)), requires_grad=True, name='w')
    report = grad_check(lambda: F.sum(F.square(w)), w, n_samples=5000, random_state=1)
    assert report.n_checked == 1000


def test_needs_reference_mode():
    w = Tensor(np.ones(2), requires_grad=True)
    with reference_mode(False):
        with pytest.raises(RuntimeError):
            grad_check(lambda: F.sum(w), w)
