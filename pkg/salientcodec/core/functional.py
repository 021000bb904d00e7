"""
File: functional.py
Description: differentiable operations on Tensor. Every op computes its forward
values with numpy and, when a parent requires a gradient, records a closure
that pushes the upstream gradient to the parents.
"""

from __future__ import absolute_import

from typing import Sequence, Tuple, Union

from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import expit, ndtr

from salientcodec.runtime import get_dtype
from salientcodec.core.tensor import Tensor, as_tensor, is_grad_enabled
from salientcodec.utils.errors import DimensionError

import math
import numpy as np

Operand = Union[Tensor, float, int, np.ndarray]

LEAKY_SLOPE = 0.01
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _make(data, parents, backward) -> Tensor:
    out = Tensor(data, dtype=get_dtype())
    if is_grad_enabled() and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._backward = backward
    return out


def _push(tensor: Tensor, grad):
    if tensor.requires_grad:
        tensor._accumulate(grad)


def unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum grad down to shape, undoing numpy broadcasting"""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


# -------------------------------------------------------------------- elementwise

def add(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)

    def backward(grad):
        _push(a, unbroadcast(grad, a.shape))
        _push(b, unbroadcast(grad, b.shape))
    return _make(a.data + b.data, (a, b), backward)


def sub(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)

    def backward(grad):
        _push(a, unbroadcast(grad, a.shape))
        _push(b, unbroadcast(-grad, b.shape))
    return _make(a.data - b.data, (a, b), backward)


def mul(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)

    def backward(grad):
        _push(a, unbroadcast(grad * b.data, a.shape))
        _push(b, unbroadcast(grad * a.data, b.shape))
    return _make(a.data * b.data, (a, b), backward)


def div(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)

    def backward(grad):
        _push(a, unbroadcast(grad / b.data, a.shape))
        _push(b, unbroadcast(-grad * a.data / (b.data * b.data), b.shape))
    return _make(a.data / b.data, (a, b), backward)


def neg(a: Operand) -> Tensor:
    a = as_tensor(a)

    def backward(grad):
        _push(a, -grad)
    return _make(-a.data, (a,), backward)


def power(a: Operand, exponent: float) -> Tensor:
    a = as_tensor(a)

    def backward(grad):
        _push(a, grad * exponent * np.power(a.data, exponent - 1))
    return _make(np.power(a.data, exponent), (a,), backward)


def square(a: Operand) -> Tensor:
    return power(a, 2)


def exp(a: Operand) -> Tensor:
    a = as_tensor(a)
    value = np.exp(a.data)

    def backward(grad):
        _push(a, grad * value)
    return _make(value, (a,), backward)


def log(a: Operand) -> Tensor:
    a = as_tensor(a)

    def backward(grad):
        _push(a, grad / a.data)
    return _make(np.log(a.data), (a,), backward)


def log2(a: Operand) -> Tensor:
    return mul(log(a), 1.0 / math.log(2.0))


def abs(a: Operand) -> Tensor:
    a = as_tensor(a)

    def backward(grad):
        _push(a, grad * np.sign(a.data))
    return _make(np.abs(a.data), (a,), backward)


def softplus(a: Operand) -> Tensor:
    a = as_tensor(a)

    def backward(grad):
        _push(a, grad * expit(a.data))
    return _make(np.logaddexp(0.0, a.data), (a,), backward)


def sigmoid(a: Operand) -> Tensor:
    a = as_tensor(a)
    value = expit(a.data)

    def backward(grad):
        _push(a, grad * value * (1.0 - value))
    return _make(value, (a,), backward)


def tanh(a: Operand) -> Tensor:
    a = as_tensor(a)
    value = np.tanh(a.data)

    def backward(grad):
        _push(a, grad * (1.0 - value * value))
    return _make(value, (a,), backward)


def relu(a: Operand) -> Tensor:
    a = as_tensor(a)
    positive = a.data > 0

    def backward(grad):
        _push(a, grad * positive)
    return _make(np.where(positive, a.data, 0.0), (a,), backward)


def leaky_relu(a: Operand, slope: float = LEAKY_SLOPE) -> Tensor:
    """max(slope * x, x); the gradient is 1 for x > 0 and slope otherwise"""
    a = as_tensor(a)
    positive = a.data > 0

    def backward(grad):
        _push(a, grad * np.where(positive, 1.0, slope))
    return _make(np.where(positive, a.data, slope * a.data), (a,), backward)


def clamp_min(a: Operand, floor: float) -> Tensor:
    a = as_tensor(a)
    keep = a.data >= floor

    def backward(grad):
        _push(a, grad * keep)
    return _make(np.maximum(a.data, floor), (a,), backward)


def normal_cdf(a: Operand) -> Tensor:
    """standard Gaussian CDF; derivative is the standard Gaussian density"""
    a = as_tensor(a)

    def backward(grad):
        _push(a, grad * _INV_SQRT_2PI * np.exp(-0.5 * a.data * a.data))
    return _make(ndtr(a.data), (a,), backward)


# -------------------------------------------------------------------- reductions

def sum(a: Operand, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)

    def backward(grad):
        if axis is not None and not keepdims:
            grad = np.expand_dims(grad, axis)
        _push(a, np.broadcast_to(grad, a.shape))
    return _make(np.sum(a.data, axis=axis, keepdims=keepdims), (a,), backward)


def mean(a: Operand, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    if axis is None:
        count = a.size
    else:
        axes = axis if isinstance(axis, tuple) else (axis,)
        count = int(np.prod([a.shape[ax] for ax in axes]))
    return mul(sum(a, axis=axis, keepdims=keepdims), 1.0 / count)


# -------------------------------------------------------------------- shape ops

def reshape(a: Operand, shape) -> Tensor:
    a = as_tensor(a)

    def backward(grad):
        _push(a, grad.reshape(a.shape))
    return _make(a.data.reshape(shape), (a,), backward)


def transpose(a: Operand, axes: Sequence[int]) -> Tensor:
    a = as_tensor(a)
    inverse = np.argsort(axes)

    def backward(grad):
        _push(a, np.transpose(grad, inverse))
    return _make(np.transpose(a.data, axes), (a,), backward)


def take(a: Operand, key) -> Tensor:
    a = as_tensor(a)

    def backward(grad):
        full = np.zeros_like(a.data)
        np.add.at(full, key, grad)
        _push(a, full)
    return _make(a.data[key], (a,), backward)


def crop(a: Operand, height: int, width: int) -> Tensor:
    """keep the top-left height x width window of an NCHW tensor"""
    a = as_tensor(a)
    if a.shape[2] < height or a.shape[3] < width:
        raise DimensionError(
            f'cannot crop {a.shape} to {height}x{width}')
    if a.shape[2] == height and a.shape[3] == width:
        return a
    return take(a, (slice(None), slice(None), slice(0, height), slice(0, width)))


def concat(tensors: Sequence[Operand], axis: int = 1) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    bounds = np.cumsum([0] + [t.shape[axis] for t in tensors])

    def backward(grad):
        for t, lo, hi in zip(tensors, bounds[:-1], bounds[1:]):
            index = [slice(None)] * grad.ndim
            index[axis] = slice(lo, hi)
            _push(t, grad[tuple(index)])
    return _make(np.concatenate([t.data for t in tensors], axis=axis), tensors, backward)


def concat_channels(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim != 4 or b.ndim != 4:
        raise DimensionError(f'concat_channels expects NCHW inputs, got {a.shape} and {b.shape}')
    if (a.shape[0], a.shape[2], a.shape[3]) != (b.shape[0], b.shape[2], b.shape[3]):
        raise DimensionError(
            f'concat_channels needs equal N, H, W, got {a.shape} and {b.shape}')
    return concat((a, b), axis=1)


# -------------------------------------------------------------------- linear algebra

def matmul(a: Operand, b: Operand) -> Tensor:
    """batched matrix product over the last two axes"""
    a, b = as_tensor(a), as_tensor(b)

    def backward(grad):
        _push(a, unbroadcast(np.matmul(grad, np.swapaxes(b.data, -1, -2)), a.shape))
        _push(b, unbroadcast(np.matmul(np.swapaxes(a.data, -1, -2), grad), b.shape))
    return _make(np.matmul(a.data, b.data), (a, b), backward)


def log_softmax(a: Operand, axis: int = 1) -> Tensor:
    a = as_tensor(a)
    shifted = a.data - a.data.max(axis=axis, keepdims=True)
    value = shifted - np.log(np.exp(shifted).sum(axis=axis, keepdims=True))

    def backward(grad):
        _push(a, grad - np.exp(value) * grad.sum(axis=axis, keepdims=True))
    return _make(value, (a,), backward)


# -------------------------------------------------------------------- filtering

def avg_pool2(a: Operand) -> Tensor:
    """
        2x2 average pooling with stride 2 on NCHW input.
        An odd extent is zero padded by one on both sides and the padding is
        counted in the average, as in the usual MS-SSIM downsampling.
    """
    a = as_tensor(a)
    n, c, h, w = a.shape
    ph, pw = h % 2, w % 2
    oh, ow = (h + 2 * ph - 2) // 2 + 1, (w + 2 * pw - 2) // 2 + 1
    padded = np.pad(a.data, ((0, 0), (0, 0), (ph, ph), (pw, pw)))
    window = padded[:, :, :2 * oh, :2 * ow]
    value = window.reshape(n, c, oh, 2, ow, 2).mean(axis=(3, 5))

    def backward(grad):
        spread = np.repeat(np.repeat(grad, 2, axis=2), 2, axis=3) * 0.25
        full = np.zeros_like(padded)
        full[:, :, :2 * oh, :2 * ow] = spread
        _push(a, full[:, :, ph:ph + h, pw:pw + w])
    return _make(value, (a,), backward)


def correlate1d_valid(a: Operand, taps: np.ndarray, axis: int) -> Tensor:
    """valid 1-d correlation with a constant filter along one axis"""
    a = as_tensor(a)
    taps = np.asarray(taps, dtype=a.dtype)
    k = len(taps)
    length = a.shape[axis] - k + 1
    if length < 1:
        raise DimensionError(
            f'axis {axis} of extent {a.shape[axis]} is shorter than the {k}-tap filter')

    def window(i):
        index = [slice(None)] * a.ndim
        index[axis] = slice(i, i + length)
        return tuple(index)

    value = np.zeros(a.shape[:axis] + (length,) + a.shape[axis + 1:], dtype=a.dtype)
    for i in range(k):
        value += taps[i] * a.data[window(i)]

    def backward(grad):
        full = np.zeros_like(a.data)
        for i in range(k):
            full[window(i)] += taps[i] * grad
        _push(a, full)
    return _make(value, (a,), backward)


# -------------------------------------------------------------------- convolutions

def _conv_output_size(size: int, kernel: int, stride: int, padding: int) -> int:
    return (size + 2 * padding - kernel) // stride + 1


def conv2d(x: Operand, weight: Tensor, bias: Tensor = None,
           stride: int = 1, padding: int = 0) -> Tensor:
    """
        Cross-correlation of NCHW x with weight of shape (Cout, Cin, k, k),
        computed as one tensordot over strided windows.
    """
    x, weight = as_tensor(x), as_tensor(weight)
    if x.ndim != 4:
        raise DimensionError(f'conv2d expects an NCHW input, got shape {x.shape}')
    if x.shape[1] != weight.shape[1]:
        raise DimensionError(
            f'conv2d input {x.shape} does not match weight {weight.shape}')
    n, _, h, w = x.shape
    cout, cin, kh, kw = weight.shape
    oh = _conv_output_size(h, kh, stride, padding)
    ow = _conv_output_size(w, kw, stride, padding)
    if oh < 1 or ow < 1:
        raise DimensionError(
            f'conv2d input {x.shape} is too small for weight {weight.shape}')

    padded = np.pad(x.data, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    windows = sliding_window_view(padded, (kh, kw), axis=(2, 3))
    windows = windows[:, :, :(oh - 1) * stride + 1:stride, :(ow - 1) * stride + 1:stride]
    value = np.tensordot(windows, weight.data, axes=([1, 4, 5], [1, 2, 3])).transpose(0, 3, 1, 2)
    parents = [x, weight]
    if bias is not None:
        bias = as_tensor(bias)
        value = value + bias.data[None, :, None, None]
        parents.append(bias)

    def backward(grad):
        if weight.requires_grad:
            weight._accumulate(np.tensordot(grad, windows, axes=([0, 2, 3], [0, 2, 3])))
        if bias is not None and bias.requires_grad:
            bias._accumulate(grad.sum(axis=(0, 2, 3)))
        if x.requires_grad:
            full = np.zeros_like(padded)
            for p in range(kh):
                for q in range(kw):
                    contrib = np.tensordot(grad, weight.data[:, :, p, q], axes=([1], [0]))
                    full[:, :, p:p + (oh - 1) * stride + 1:stride,
                         q:q + (ow - 1) * stride + 1:stride] += contrib.transpose(0, 3, 1, 2)
            x._accumulate(full[:, :, padding:padding + h, padding:padding + w])
    return _make(value, parents, backward)


def conv_transpose2d(x: Operand, weight: Tensor, bias: Tensor = None,
                     stride: int = 2, padding: int = 0, output_padding: int = 0) -> Tensor:
    """
        Transposed convolution with weight of shape (Cin, Cout, k, k).
        Output extent is (h - 1) * stride - 2 * padding + k + output_padding,
        which makes it the adjoint of conv2d with the same weight and geometry.
    """
    x, weight = as_tensor(x), as_tensor(weight)
    if x.ndim != 4:
        raise DimensionError(f'conv_transpose2d expects an NCHW input, got shape {x.shape}')
    if x.shape[1] != weight.shape[0]:
        raise DimensionError(
            f'conv_transpose2d input {x.shape} does not match weight {weight.shape}')
    n, _, h, w = x.shape
    cin, cout, kh, kw = weight.shape
    full_h = (h - 1) * stride + kh + output_padding
    full_w = (w - 1) * stride + kw + output_padding
    oh, ow = full_h - 2 * padding, full_w - 2 * padding
    if oh < 1 or ow < 1:
        raise DimensionError(
            f'conv_transpose2d padding {padding} leaves no output for input {x.shape}')

    def rows(p):
        return slice(p, p + (h - 1) * stride + 1, stride)

    def cols(q):
        return slice(q, q + (w - 1) * stride + 1, stride)

    full = np.zeros((n, cout, full_h, full_w), dtype=get_dtype())
    for p in range(kh):
        for q in range(kw):
            contrib = np.tensordot(x.data, weight.data[:, :, p, q], axes=([1], [0]))
            full[:, :, rows(p), cols(q)] += contrib.transpose(0, 3, 1, 2)
    value = full[:, :, padding:padding + oh, padding:padding + ow]
    parents = [x, weight]
    if bias is not None:
        bias = as_tensor(bias)
        value = value + bias.data[None, :, None, None]
        parents.append(bias)

    def backward(grad):
        full_grad = np.zeros((n, cout, full_h, full_w), dtype=grad.dtype)
        full_grad[:, :, padding:padding + oh, padding:padding + ow] = grad
        if bias is not None and bias.requires_grad:
            bias._accumulate(grad.sum(axis=(0, 2, 3)))
        if weight.requires_grad:
            weight_grad = np.zeros_like(weight.data)
            for p in range(kh):
                for q in range(kw):
                    weight_grad[:, :, p, q] = np.tensordot(
                        x.data, full_grad[:, :, rows(p), cols(q)], axes=([0, 2, 3], [0, 2, 3]))
            weight._accumulate(weight_grad)
        if x.requires_grad:
            x_grad = np.zeros_like(x.data)
            for p in range(kh):
                for q in range(kw):
                    x_grad += np.tensordot(full_grad[:, :, rows(p), cols(q)],
                                           weight.data[:, :, p, q],
                                           axes=([1], [1])).transpose(0, 3, 1, 2)
            x._accumulate(x_grad)
    return _make(np.ascontiguousarray(value), parents, backward)
