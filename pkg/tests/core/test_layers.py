from salientcodec.core.layers import (Conv2d, LayerSpec, LeakyReLU, Sequential, TransposedConv2d,
                                      build_layer, Concat)
from salientcodec.core.parameters import ParameterStore
from salientcodec.core.tensor import Tensor

import pytest
import numpy as np


def test_notation_round_trip():
    spec = LayerSpec.from_notation('Conv 128/5/2')
    assert (spec.kind, spec.out_channels, spec.kernel, spec.stride) == ('conv', 128, 5, 2)
    assert spec.padding == 2
    assert repr(spec) == 'Conv 128/5/2'
    assert repr(LayerSpec.from_notation('TConv 3/5/2')) == 'TConv 3/5/2'


@pytest.mark.parametrize('kwargs', [
    dict(kind='conv', out_channels=4, kernel=4, stride=1),
    dict(kind='conv', out_channels=4, kernel=3, stride=3),
    dict(kind='tconv', out_channels=0, kernel=5, stride=2),
    dict(kind='pool'),
])
def test_invalid_specs(kwargs):
    with pytest.raises(ValueError):
        LayerSpec(**kwargs)


def test_bad_notation():
    with pytest.raises(ValueError):
        LayerSpec.from_notation('Dense 10')


@pytest.mark.parametrize('kernel', [2, 3, 4, 5])
def test_stride_two_tconv_doubles(kernel):
    spec = LayerSpec('tconv', 2, kernel, 2)
    assert spec.output_size(8) == 16


def test_tconv_layer_doubling_contract(rng):
    store = ParameterStore()
    layer = TransposedConv2d(store, 'up', 4, LayerSpec('tconv', 6, 5, 2), rng)
    out = layer(Tensor(rng.standard_normal((1, 4, 8, 16))))
    assert out.shape == (1, 6, 16, 32)


def test_conv_layer_registers_he_uniform_weights(rng):
    store = ParameterStore()
    Conv2d(store, 'c', 3, LayerSpec('conv', 8, 5, 2), rng)
    assert store.names() == ['c.weight', 'c.bias']
    bound = np.sqrt(6.0 / (3 * 25))
    assert np.all(np.abs(store['c.weight'].data) <= bound)
    assert np.all(store['c.bias'].data == 0.0)
    assert store['c.weight'].shape == (8, 3, 5, 5)


def test_sequential_threads_channels(rng):
    store = ParameterStore()
    net = Sequential(store, 'enc', 3, [LayerSpec('conv', 6, 5, 2), LayerSpec('activation'),
                                       LayerSpec('conv', 5, 3, 1)], rng)
    assert net.out_channels == 5
    assert store.names() == ['enc.0.weight', 'enc.0.bias', 'enc.2.weight', 'enc.2.bias']
    out = net(Tensor(rng.uniform(size=(2, 3, 16, 16))))
    assert out.shape == (2, 5, 8, 8)


def test_sequential_rejects_concat(rng):
    with pytest.raises(ValueError):
        Sequential(ParameterStore(), 's', 3, [LayerSpec('concat')], rng)


def test_build_layer_kinds(rng):
    store = ParameterStore()
    assert isinstance(build_layer(store, 'a', 2, LayerSpec('activation')), LeakyReLU)
    assert isinstance(build_layer(store, 'b', 2, LayerSpec('concat')), Concat)
    assert isinstance(build_layer(store, 'c', 2, LayerSpec('conv', 2, 3, 1), rng), Conv2d)


def test_same_seed_same_weights():
    a, b = ParameterStore(), ParameterStore()
    Conv2d(a, 'c', 3, LayerSpec('conv', 4, 3, 1), 7)
    Conv2d(b, 'c', 3, LayerSpec('conv', 4, 3, 1), 7)
    assert a.digest() == b.digest()
