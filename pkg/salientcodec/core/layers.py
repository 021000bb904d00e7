"""
File: layers.py
Description: layer specifications in the "Conv C/k/s" notation and the layer
objects built from them. Layers own no state besides the names of their
parameters inside a ParameterStore.
"""

from __future__ import absolute_import

from typing import List, Sequence

from salientcodec.core import functional as F
from salientcodec.core.parameters import ParameterStore
from salientcodec.core.tensor import Tensor
from salientcodec.utils.validation import check_random_state

import re
import numpy as np

LAYER_KINDS = ('conv', 'tconv', 'activation', 'concat')

# padding / output padding that make a stride-2 transposed conv exactly double its input
_TCONV_DOUBLING = {2: (0, 0), 3: (1, 1), 4: (1, 0), 5: (2, 1)}

_NOTATION = re.compile(r'^\s*(conv|tconv)\s+(\d+)\s*/\s*(\d+)\s*/\s*(\d+)\s*$', re.IGNORECASE)


class LayerSpec():
    def __init__(self, kind: str, out_channels: int = None, kernel: int = None,
                 stride: int = 1, padding: int = None, output_padding: int = None):
        if kind not in LAYER_KINDS:
            raise ValueError(f'kind must be one of {LAYER_KINDS}, got {kind!r}')
        self.kind = kind
        self.out_channels = out_channels
        self.kernel = kernel
        self.stride = stride
        self.padding = padding
        self.output_padding = output_padding
        if kind in ('conv', 'tconv'):
            self._validate_weighted()

    def _validate_weighted(self):
        if self.out_channels is None or self.out_channels < 1:
            raise ValueError(f'out_channels must be a positive integer, got {self.out_channels}')
        if self.kernel is None or self.kernel < 1:
            raise ValueError(f'kernel must be a positive integer, got {self.kernel}')
        if self.stride not in (1, 2):
            raise ValueError(f'stride must be 1 or 2, got {self.stride}')
        if self.kind == 'conv':
            if self.kernel % 2 != 1:
                raise ValueError(f'conv kernels must be odd, got {self.kernel}')
            if self.padding is None:
                self.padding = self.kernel // 2
            self.output_padding = 0
        else:
            default_p, default_op = (self.kernel // 2, 0)
            if self.stride == 2:
                default_p, default_op = _TCONV_DOUBLING.get(self.kernel, (self.kernel // 2, 1))
            if self.padding is None:
                self.padding = default_p
            if self.output_padding is None:
                self.output_padding = default_op
        if self.padding < 0 or self.output_padding < 0:
            raise ValueError('padding and output_padding must be non-negative')

    @classmethod
    def from_notation(cls, text: str) -> 'LayerSpec':
        """Parse 'Conv C/k/s' or 'TConv C/k/s'"""
        match = _NOTATION.match(text)
        if match is None:
            raise ValueError(f'cannot parse layer notation {text!r}')
        kind, c, k, s = match.groups()
        return cls(kind.lower(), out_channels=int(c), kernel=int(k), stride=int(s))

    def output_size(self, size: int) -> int:
        if self.kind == 'conv':
            return (size + 2 * self.padding - self.kernel) // self.stride + 1
        if self.kind == 'tconv':
            return (size - 1) * self.stride - 2 * self.padding + self.kernel + self.output_padding
        return size

    def __eq__(self, other):
        return isinstance(other, LayerSpec) and vars(self) == vars(other)

    def __repr__(self):
        if self.kind in ('conv', 'tconv'):
            name = 'Conv' if self.kind == 'conv' else 'TConv'
            return f'{name} {self.out_channels}/{self.kernel}/{self.stride}'
        return f'LayerSpec({self.kind!r})'


class Layer():
    def __init__(self, spec: LayerSpec, name: str = None):
        self.spec = spec
        self.name = name

    def __call__(self, x: Tensor, *args) -> Tensor:
        return self.forward(x, *args)

    def forward(self, x: Tensor, *args) -> Tensor:
        raise NotImplementedError


class _WeightedLayer(Layer):
    def __init__(self, store: ParameterStore, name: str, in_channels: int,
                 spec: LayerSpec, random_state=None):
        super(_WeightedLayer, self).__init__(spec, name)
        random_state = check_random_state(random_state)
        self.store = store
        self.in_channels = in_channels
        shape = self._weight_shape()
        # He-uniform over the fan-in of one output position
        bound = np.sqrt(6.0 / (in_channels * spec.kernel * spec.kernel))
        store.add(f'{name}.weight', Tensor(random_state.uniform(-bound, bound, size=shape)))
        store.add(f'{name}.bias', Tensor(np.zeros(spec.out_channels)))

    def _weight_shape(self):
        raise NotImplementedError

    @property
    def weight(self) -> Tensor:
        return self.store[f'{self.name}.weight']

    @property
    def bias(self) -> Tensor:
        return self.store[f'{self.name}.bias']


class Conv2d(_WeightedLayer):
    def _weight_shape(self):
        k = self.spec.kernel
        return (self.spec.out_channels, self.in_channels, k, k)

    def forward(self, x: Tensor) -> Tensor:
        return F.conv2d(x, self.weight, self.bias,
                        stride=self.spec.stride, padding=self.spec.padding)


class TransposedConv2d(_WeightedLayer):
    def _weight_shape(self):
        k = self.spec.kernel
        return (self.in_channels, self.spec.out_channels, k, k)

    def forward(self, x: Tensor) -> Tensor:
        return F.conv_transpose2d(x, self.weight, self.bias,
                                  stride=self.spec.stride, padding=self.spec.padding,
                                  output_padding=self.spec.output_padding)


class LeakyReLU(Layer):
    def __init__(self, slope: float = F.LEAKY_SLOPE):
        super(LeakyReLU, self).__init__(LayerSpec('activation'))
        self.slope = slope

    def forward(self, x: Tensor) -> Tensor:
        return F.leaky_relu(x, self.slope)


class Concat(Layer):
    def __init__(self):
        super(Concat, self).__init__(LayerSpec('concat'))

    def forward(self, a: Tensor, b: Tensor) -> Tensor:
        return F.concat_channels(a, b)


def build_layer(store: ParameterStore, name: str, in_channels: int,
                spec: LayerSpec, random_state=None) -> Layer:
    if spec.kind == 'conv':
        return Conv2d(store, name, in_channels, spec, random_state)
    if spec.kind == 'tconv':
        return TransposedConv2d(store, name, in_channels, spec, random_state)
    if spec.kind == 'activation':
        return LeakyReLU()
    return Concat()


class Sequential(Layer):
    """chain of single-input layers; channel counts are threaded through"""

    def __init__(self, store: ParameterStore, name: str, in_channels: int,
                 specs: Sequence[LayerSpec], random_state=None):
        super(Sequential, self).__init__(None, name)
        random_state = check_random_state(random_state)
        self.layers: List[Layer] = []
        channels = in_channels
        for i, spec in enumerate(specs):
            if spec.kind == 'concat':
                raise ValueError('Sequential cannot hold concat layers')
            self.layers.append(build_layer(store, f'{name}.{i}', channels, spec, random_state))
            if spec.kind in ('conv', 'tconv'):
                channels = spec.out_channels
        self.out_channels = channels

    def forward(self, x: Tensor) -> Tensor:
        for layer in self.layers:
            x = layer(x)
        return x
