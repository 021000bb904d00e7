"""
File: tensor.py
Description: dense NCHW array with a reverse-mode tape.

A Tensor owns its forward values; ops in functional.py attach a backward
closure and the parent tensors when any parent requires a gradient. The tape
of one graph belongs to the thread that built it.
"""

from __future__ import absolute_import

from contextlib import contextmanager
from typing import Tuple

from salientcodec.runtime import get_dtype

import threading
import numpy as np

_state = threading.local()


def is_grad_enabled() -> bool:
    return getattr(_state, 'grad_enabled', True)


@contextmanager
def no_grad():
    previous = is_grad_enabled()
    _state.grad_enabled = False
    try:
        yield
    finally:
        _state.grad_enabled = previous


class Tensor():
    __array_priority__ = 100

    def __init__(self, data, requires_grad: bool = False, dtype=None, name: str = None):
        self.data = np.asarray(data, dtype=dtype if dtype is not None else get_dtype())
        self.requires_grad = requires_grad
        self.grad = None
        self.name = name
        self._parents = ()
        self._backward = None

    def __repr__(self):
        grad = ', requires_grad=True' if self.requires_grad else ''
        return f'Tensor(shape={self.shape}{grad})'

    def __len__(self):
        return self.data.shape[0]

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def dtype(self):
        return self.data.dtype

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else float(self.data)

    def detach(self) -> 'Tensor':
        return Tensor(self.data.copy(), dtype=self.data.dtype)

    def zero_grad(self):
        self.grad = None

    def _accumulate(self, grad):
        if grad.shape != self.data.shape:
            raise ValueError(
                f'gradient of shape {grad.shape} does not match tensor of shape {self.data.shape}')
        if self.grad is None:
            self.grad = np.array(grad, dtype=self.data.dtype, copy=True)
        else:
            self.grad += grad

    def _topological_order(self):
        order, visited = [], set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            # reversed keeps the traversal order equal to the recursive one
            for parent in reversed(node._parents):
                if parent.requires_grad and id(parent) not in visited:
                    stack.append((parent, False))
        return order

    def backward(self, grad=None):
        """
            Run reverse-mode differentiation from this node.
            The reduction order is fixed by the topological order of the tape.
        """
        if not self.requires_grad:
            raise RuntimeError('backward() called on a tensor that does not require grad')
        if grad is None:
            if self.data.size != 1:
                raise ValueError('grad can be omitted only for scalar outputs')
            grad = np.ones_like(self.data)
        self._accumulate(np.asarray(grad, dtype=self.data.dtype))
        for node in reversed(self._topological_order()):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    # operator sugar, all routed through functional
    def __add__(self, other):
        from .functional import add
        return add(self, other)

    def __radd__(self, other):
        from .functional import add
        return add(other, self)

    def __sub__(self, other):
        from .functional import sub
        return sub(self, other)

    def __rsub__(self, other):
        from .functional import sub
        return sub(other, self)

    def __mul__(self, other):
        from .functional import mul
        return mul(self, other)

    def __rmul__(self, other):
        from .functional import mul
        return mul(other, self)

    def __truediv__(self, other):
        from .functional import div
        return div(self, other)

    def __rtruediv__(self, other):
        from .functional import div
        return div(other, self)

    def __neg__(self):
        from .functional import neg
        return neg(self)

    def __pow__(self, exponent):
        from .functional import power
        return power(self, exponent)

    def __getitem__(self, key):
        from .functional import take
        return take(self, key)


def as_tensor(value) -> Tensor:
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def parameter(data, name: str = None, dtype=None) -> Tensor:
    return Tensor(data, requires_grad=True, dtype=dtype, name=name)
