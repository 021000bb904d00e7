"""
File: codec.py
Description: the hierarchical codec graph. An encoder f_enc feeds three
cascaded latent space units (LSU 1..3); every LSU downscales its input, forms
y_n from its features and the upsampled output v_{n+1} of the deeper unit,
and turns the decoded y_n back into v_n. Levels are coded 3 -> 2 -> 1 and the
decoder f_dec reconstructs the image from v_1.
"""

from __future__ import absolute_import

from collections import OrderedDict
from typing import Callable, Tuple

from salientcodec.core import functional as F
from salientcodec.core.layers import Conv2d, LayerSpec, Sequential, TransposedConv2d
from salientcodec.core.parameters import ParameterStore
from salientcodec.core.tensor import Tensor, as_tensor, no_grad
from salientcodec.entropy.gaussian_conditional import quantize_symbols
from salientcodec.entropy.rate import EntropyModels, RateEstimate, estimate_rate
from salientcodec.masks.saliency_mask import SaliencyMask, grid_dims, project_mask_to_level
from salientcodec.models.config import ModelConfig
from salientcodec.models.latents import (LatentSet, LevelLatents, LossBreakdown,
                                         ReconstructionResult, CODING_ORDER)
from salientcodec.utils.errors import DimensionError
from salientcodec.utils.validation import check_multiple_of, check_random_state

import math
import numpy as np

MODES = ('train', 'infer')


def _conv(channels, kernel, stride):
    return LayerSpec('conv', channels, kernel, stride)


def _tconv(channels, kernel, stride):
    return LayerSpec('tconv', channels, kernel, stride)


_ACT = LayerSpec('activation')


def pad_to_multiple(x: np.ndarray, multiple: int = 64) -> np.ndarray:
    """reflect-pad an H x W x C image at the bottom / right to the next multiple"""
    x = np.asarray(x)
    height, width = x.shape[:2]
    pad_h = math.ceil(height / multiple) * multiple - height
    pad_w = math.ceil(width / multiple) * multiple - width
    if pad_h == 0 and pad_w == 0:
        return x
    extra = [(0, 0)] * (x.ndim - 2)
    mode = 'reflect' if min(height, width) > 1 else 'edge'
    return np.pad(x, [(0, pad_h), (0, pad_w)] + extra, mode=mode)


def crop_to(x, height: int, width: int):
    """top-left crop of an H x W x C array or an NCHW tensor"""
    if isinstance(x, Tensor):
        return F.crop(x, height, width)
    return np.asarray(x)[:height, :width]


def image_to_tensor(image: np.ndarray) -> Tensor:
    """H x W x 3 -> 1 x 3 x H x W"""
    image = np.asarray(image)
    if image.ndim != 3:
        raise DimensionError(f'expected an H x W x 3 image, got shape {image.shape}')
    return Tensor(np.transpose(image, (2, 0, 1))[None])


def images_to_tensor(images) -> Tensor:
    return Tensor(np.stack([np.transpose(np.asarray(img), (2, 0, 1)) for img in images]))


def quantize(y, mode: str, random_state=None) -> Tensor:
    """quantize.
        train: additive uniform noise U(-1/2, 1/2), a differentiable surrogate.
        infer: round to nearest, ties away from zero, clamped to the coded
        alphabet; the result is a constant.
    """
    y = as_tensor(y)
    if mode == 'train':
        random_state = check_random_state(random_state)
        return F.add(y, random_state.uniform(-0.5, 0.5, size=y.shape))
    if mode == 'infer':
        return Tensor(quantize_symbols(y.data).astype(y.dtype))
    raise ValueError(f'mode must be one of {MODES}, got {mode!r}')


def apply_mask(y, level_mask: np.ndarray) -> Tensor:
    """keep the positions of the level's cells, zero everything else"""
    y = as_tensor(y)
    if tuple(level_mask.shape) != tuple(y.shape[2:]):
        raise DimensionError(
            f'level mask {level_mask.shape} does not match latent {y.shape}')
    return F.mul(y, np.asarray(level_mask, dtype=y.dtype))


class HierarchicalCodec():
    def __init__(self, config: ModelConfig = None, store: ParameterStore = None, random_state=None):
        self.config = config or ModelConfig()
        random_state = check_random_state(random_state)
        self.store = ParameterStore()
        c = self.config.latent_channels
        h = self.config.hyper_channels
        f = self.config.feature_channels
        params = self.store

        self.encoder = Sequential(params, 'enc', 3, [
            _conv(f, 5, 2), _ACT, _conv(f, 5, 2), _ACT, _conv(f, 5, 2), _ACT], random_state)
        self.down, self.latent, self.up = {}, {}, {}
        self.hyper_analysis, self.hyper_synthesis, self.hyper_params = {}, {}, {}
        for n in (1, 2, 3):
            self.down[n] = Sequential(params, f'lsu{n}.down', f, [_conv(f, 5, 2), _ACT], random_state)
            self.latent[n] = Conv2d(params, f'lsu{n}.latent', 2 * f, _conv(c, 3, 1), random_state)
            self.up[n] = Sequential(params, f'lsu{n}.up', c + f, [_tconv(f, 5, 2), _ACT], random_state)
            self.hyper_analysis[n] = Sequential(params, f'lsu{n}.ha', c, [
                _conv(h, 3, 1), _ACT, _conv(h, 5, 2)], random_state)
            self.hyper_synthesis[n] = TransposedConv2d(params, f'lsu{n}.hs', h, _tconv(h, 5, 2),
                                                       random_state)
            self.hyper_params[n] = Conv2d(params, f'lsu{n}.hs_params', h + f, _conv(2 * c, 3, 1),
                                          random_state)
        self.decoder = Sequential(params, 'dec', f, [
            _tconv(f, 5, 2), _ACT, _tconv(f, 5, 2), _ACT, _tconv(3, 5, 2)], random_state)
        self.entropy = EntropyModels(params, h, scale_bound=self.config.scale_bound,
                                     random_state=random_state)
        if store is not None:
            self.store.assign(store)

    def __repr__(self):
        return f'HierarchicalCodec({self.config!r}, {self.store.num_parameters()} parameters)'

    def digest(self) -> bytes:
        return self.store.digest()

    # ------------------------------------------------------------ geometry

    def latent_grid_dims(self, height: int, width: int, level: int) -> Tuple[int, int]:
        check_multiple_of(height, width, self.config.pad_multiple)
        if level not in CODING_ORDER:
            raise ValueError(f'level must be one of 1, 2, 3, got {level}')
        factor = self.config.level_factor(level)
        return height // factor, width // factor

    def hyper_grid_dims(self, height: int, width: int, level: int) -> Tuple[int, int]:
        h, w = self.latent_grid_dims(height, width, level)
        return math.ceil(h / 2), math.ceil(w / 2)

    def zero_context(self, height: int, width: int, batch: int = 1) -> Tensor:
        """v_4, the missing output of a fourth unit"""
        h, w = self.latent_grid_dims(height, width, 3)
        return Tensor(np.zeros((batch, self.config.feature_channels, h, w)))

    # ------------------------------------------------------------ building blocks

    def hyper_parameters(self, level: int, z_hat: Tensor, v_next: Tensor) -> Tuple[Tensor, Tensor]:
        """mu and sigma of y_level from z_hat and the deeper unit's output"""
        c = self.config.latent_channels
        h, w = v_next.shape[2:]
        feat = F.leaky_relu(F.crop(self.hyper_synthesis[level](z_hat), h, w))
        params = self.hyper_params[level](F.concat_channels(feat, v_next))
        mu = F.take(params, (slice(None), slice(0, c)))
        raw = F.take(params, (slice(None), slice(c, 2 * c)))
        sigma = F.add(F.softplus(raw), self.config.scale_bound)
        return mu, sigma

    def upsample_level(self, level: int, y_hat: Tensor, v_next: Tensor) -> Tensor:
        return self.up[level](F.concat_channels(y_hat, v_next))

    def _check_input(self, x, m: SaliencyMask) -> Tensor:
        x = image_to_tensor(x) if not isinstance(x, Tensor) else x
        if x.ndim != 4 or x.shape[1] != 3:
            raise DimensionError(f'expected an N x 3 x H x W input, got shape {x.shape}')
        height, width = x.shape[2:]
        check_multiple_of(height, width, self.config.pad_multiple)
        if m.shape != grid_dims(height, width):
            raise DimensionError(
                f'mask grid {m.shape} does not match a {height}x{width} image '
                f'({grid_dims(height, width)} cells)')
        return x

    # ------------------------------------------------------------ graph

    def encode_to_latents(self, x, m: SaliencyMask, mode: str = 'infer',
                          random_state=None, original_size=None) -> LatentSet:
        """encode_to_latents.
            Runs f_enc and the three downscaling convs, then forms, masks and
            quantizes y_3, y_2, y_1 in coding order.

        Args:
            x: N x 3 x H x W tensor or H x W x 3 array, H and W multiples of 64
            m: SaliencyMask on the same image
            mode: 'train' (noisy quantization) or 'infer' (rounding)
            random_state: noise seed for train mode
            original_size: unpadded size recorded with the latents
        """
        if mode not in MODES:
            raise ValueError(f'mode must be one of {MODES}, got {mode!r}')
        random_state = check_random_state(random_state)
        x = self._check_input(x, m)
        height, width = x.shape[2:]

        features = {}
        u = self.encoder(x)
        for n in (1, 2, 3):
            u = self.down[n](u)
            features[n] = u

        levels = OrderedDict()
        v_next = self.zero_context(height, width, x.shape[0])
        for n in CODING_ORDER:
            level_mask = project_mask_to_level(m, n)
            y = self.latent[n](F.concat_channels(features[n], v_next))
            y_masked = apply_mask(y, level_mask)
            y_hat = apply_mask(quantize(y_masked, mode, random_state), level_mask)
            z = self.hyper_analysis[n](y_masked)
            z_hat = quantize(z, mode, random_state)
            mu, sigma = self.hyper_parameters(n, z_hat, v_next)
            levels[n] = LevelLatents(n, y_hat, z_hat, mu, sigma, level_mask,
                                     y=y, y_masked=y_masked, z=z)
            v_next = self.upsample_level(n, y_hat, v_next)
        return LatentSet(levels, m, mode, (height, width), original_size)

    def decode_from_latents(self, latents: LatentSet, rate: RateEstimate = None) -> ReconstructionResult:
        """mirror the LSU decoder path from y_3 down to y_1, then run f_dec"""
        latents.check_complete()
        height, width = latents.image_size
        v = self.zero_context(height, width, latents[3].y_hat.shape[0])
        for n in CODING_ORDER:
            v = self.upsample_level(n, latents[n].y_hat, v)
        x_hat = self.decoder(v)
        if rate is None:
            return ReconstructionResult(x_hat, original_size=latents.original_size)
        return ReconstructionResult(x_hat, rate.per_level, rate.cell_bits, latents.original_size)

    def estimate_rate(self, latents: LatentSet) -> RateEstimate:
        return estimate_rate(latents, self.entropy)

    def forward_train(self, x, m: SaliencyMask, lmbda: float,
                      task_loss_provider: Callable, random_state=None) -> LossBreakdown:
        """forward_train.
            One differentiable graph: encode, noisy quantization, rate
            estimate, decode, distortion. The rate term is in bits per pixel.

        Args:
            x: N x 3 x H x W batch
            m: mask shared by the batch
            lmbda: rate weight
            task_loss_provider: callable (x, x_hat) -> (distortion Tensor, terms dict)
            random_state: quantization noise seed
        """
        x = self._check_input(x, m)
        latents = self.encode_to_latents(x, m, 'train', random_state)
        rate = self.estimate_rate(latents)
        recon = self.decode_from_latents(latents, rate)
        distortion, terms = task_loss_provider(x, recon.x_hat)
        n_pixels = x.shape[0] * x.shape[2] * x.shape[3]
        terms = OrderedDict(terms)
        terms['rate_bits'] = rate.bits
        terms['bpp_estimate'] = rate.bits / n_pixels
        return LossBreakdown(distortion, F.mul(rate.total, 1.0 / n_pixels), lmbda, terms)

    def reconstruct(self, image: np.ndarray, m: SaliencyMask):
        """pad, encode in inference mode, decode and crop back"""
        height, width = np.shape(image)[:2]
        padded = pad_to_multiple(image, self.config.pad_multiple)
        with no_grad():
            latents = self.encode_to_latents(padded, m, 'infer', original_size=(height, width))
            rate = self.estimate_rate(latents)
            recon = self.decode_from_latents(latents, rate)
        return recon, latents, rate

    def parameters(self) -> ParameterStore:
        return self.store
