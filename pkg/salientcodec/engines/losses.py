"""
File: losses.py
Description: rate-distortion objectives. The HVS objective weighs MSE and
MS-SSIM; the machine objective replaces the distortion by the task loss of a
frozen analysis network.
"""

from __future__ import absolute_import

from collections import OrderedDict

from salientcodec.core import functional as F
from salientcodec.core.metrics import MS_SSIM_WEIGHTS, SSIM_WINDOW, ms_ssim, reduce_mse
from salientcodec.core.tensor import Tensor
from salientcodec.models.latents import LossBreakdown
from salientcodec.models.proxy import TaskLoss, TaskLossProvider

import warnings

MS_SSIM_FACTOR = 0.1


def ms_ssim_levels(height: int, width: int) -> int:
    """largest scale count the image supports, at most five"""
    side = min(height, width)
    levels = len(MS_SSIM_WEIGHTS)
    while levels > 1 and side < (SSIM_WINDOW - 1) * 2 ** (levels - 1):
        levels -= 1
    return levels


def _hvs_parts(x, x_hat):
    """(distortion, mse, ms_ssim) of the HVS objective"""
    levels = ms_ssim_levels(x.shape[2], x.shape[3])
    if levels < len(MS_SSIM_WEIGHTS):
        warnings.warn(f'{x.shape[2]}x{x.shape[3]} input: MS-SSIM reduced to {levels} scales',
                      UserWarning)
    mse, msssim = reduce_mse(x, x_hat), ms_ssim(x, x_hat, levels=levels)
    return F.add(mse, F.mul(F.sub(1.0, msssim), MS_SSIM_FACTOR)), mse, msssim


def distortion_hvs(x, x_hat) -> Tensor:
    """mse + 0.1 * (1 - ms_ssim)"""
    return _hvs_parts(x, x_hat)[0]


class HVSLoss(TaskLossProvider):
    def __call__(self, x, x_hat):
        distortion, mse, msssim = _hvs_parts(x, x_hat)
        return distortion, OrderedDict([('loss_mse', float(mse.data)),
                                        ('loss_msssim', float(1.0 - msssim.data))])


def loss_hvs(codec, x, m, lmbda: float, random_state=None) -> LossBreakdown:
    return codec.forward_train(x, m, lmbda, HVSLoss(), random_state)


def loss_vcm(codec, x, m, lmbda: float, proxy, gt_labels, hvs_weight: float = 0.0,
             random_state=None) -> LossBreakdown:
    """loss_vcm.
        Task loss of the frozen proxy on the reconstruction plus lmbda times the
        rate; gradients reach the codec parameters only.

    Args:
        codec: HierarchicalCodec
        x: N x 3 x H x W batch
        m: SaliencyMask of the batch
        lmbda: rate weight
        proxy: ProxySegNet, frozen before the call
        gt_labels: N x H x W class labels
        hvs_weight: weight of an extra HVS distortion term
    """
    if not proxy.frozen:
        raise ValueError('the proxy network has to be frozen before codec training')
    provider = TaskLoss(proxy, gt_labels, hvs_weight, distortion_hvs)
    return codec.forward_train(x, m, lmbda, provider, random_state)
