"""
File: proxy.py
Description: the frozen analysis network standing in for an instance
segmentation model. It predicts per-pixel class logits and its per-pixel
cross-entropy is the task loss the codec is trained against.
"""

from __future__ import absolute_import

from abc import ABC, abstractmethod
from collections import OrderedDict
from typing import Dict, Tuple

from salientcodec.core import functional as F
from salientcodec.core.layers import LayerSpec, Sequential
from salientcodec.core.parameters import ParameterStore
from salientcodec.core.tensor import Tensor, as_tensor, no_grad
from salientcodec.utils.errors import DimensionError
from salientcodec.utils.validation import check_random_state

import numpy as np

NUM_CLASSES = 4


class TaskLossProvider(ABC):
    """(x, x_hat) -> (differentiable distortion, scalar terms for logging)"""

    @abstractmethod
    def __call__(self, x: Tensor, x_hat: Tensor) -> Tuple[Tensor, Dict[str, float]]:
        pass


def one_hot(labels: np.ndarray, num_classes: int) -> np.ndarray:
    """N x H x W integer labels -> N x K x H x W indicator"""
    labels = np.asarray(labels)
    if labels.min() < 0 or labels.max() >= num_classes:
        raise ValueError(f'labels must lie in [0, {num_classes}), got '
                         f'[{labels.min()}, {labels.max()}]')
    return np.moveaxis(np.eye(num_classes)[labels], -1, 1)


class ProxySegNet():
    """
        conv 16/3/2, conv 32/3/2, tconv 16/4/2, tconv K/4/2 with leaky ReLU
        between them; input sides must be multiples of 4.
    """

    def __init__(self, num_classes: int = NUM_CLASSES, store: ParameterStore = None,
                 random_state=None):
        if num_classes < 2:
            raise ValueError(f'num_classes must be at least 2, got {num_classes}')
        random_state = check_random_state(random_state)
        self.num_classes = num_classes
        self.store = ParameterStore()
        act = LayerSpec('activation')
        self.net = Sequential(self.store, 'proxy', 3, [
            LayerSpec('conv', 16, 3, 2), act,
            LayerSpec('conv', 32, 3, 2), act,
            LayerSpec('tconv', 16, 4, 2), act,
            LayerSpec('tconv', num_classes, 4, 2)], random_state)
        if store is not None:
            self.store.assign(store)
        self.frozen = False

    def __repr__(self):
        state = 'frozen' if self.frozen else 'trainable'
        return f'ProxySegNet(K={self.num_classes}, {state})'

    def freeze(self):
        self.store.freeze()
        self.frozen = True

    def unfreeze(self):
        self.store.unfreeze()
        self.frozen = False

    def logits(self, x) -> Tensor:
        x = as_tensor(x)
        if x.shape[2] % 4 or x.shape[3] % 4:
            raise DimensionError(f'proxy input sides must be multiples of 4, got {x.shape}')
        return self.net(x)

    def task_loss(self, x_hat, labels: np.ndarray) -> Tensor:
        """mean per-pixel cross-entropy against integer labels (N x H x W)"""
        logp = F.log_softmax(self.logits(x_hat), axis=1)
        target = one_hot(labels, self.num_classes)
        if target.shape != logp.shape:
            raise DimensionError(f'labels {np.shape(labels)} do not match logits {logp.shape}')
        n_pixels = target.shape[0] * target.shape[2] * target.shape[3]
        return F.mul(F.sum(F.mul(logp, target)), -1.0 / n_pixels)

    def pixel_loss(self, x, labels: np.ndarray) -> np.ndarray:
        """per-pixel cross-entropy (N x H x W), no tape"""
        with no_grad():
            logp = F.log_softmax(self.logits(x), axis=1).data
        labels = np.asarray(labels)
        if labels.shape != logp.shape[:1] + logp.shape[2:]:
            raise DimensionError(f'labels {labels.shape} do not match logits {logp.shape}')
        return -np.take_along_axis(logp, labels[:, None].astype(np.int64), axis=1)[:, 0]

    def predict(self, x) -> np.ndarray:
        with no_grad():
            return np.argmax(self.logits(x).data, axis=1)

    def class_iou(self, x, labels: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """per-class IoU in percent and per-class ground-truth pixel counts"""
        pred = self.predict(x)
        labels = np.asarray(labels)
        iou = np.zeros(self.num_classes)
        support = np.zeros(self.num_classes, dtype=np.int64)
        for k in range(self.num_classes):
            p, g = pred == k, labels == k
            union = np.count_nonzero(p | g)
            support[k] = np.count_nonzero(g)
            iou[k] = 100.0 * np.count_nonzero(p & g) / union if union else 100.0
        return iou, support

    def digest(self) -> bytes:
        return self.store.digest()


class TaskLoss(TaskLossProvider):
    """
        Task loss of a frozen ProxySegNet on the reconstruction, optionally
        plus hvs_weight times the HVS distortion.
    """

    def __init__(self, proxy: ProxySegNet, labels: np.ndarray, hvs_weight: float = 0.0,
                 hvs_distortion=None):
        if hvs_weight < 0:
            raise ValueError(f'hvs_weight must be non-negative, got {hvs_weight}')
        if hvs_weight > 0 and hvs_distortion is None:
            raise ValueError('hvs_weight > 0 needs an hvs_distortion callable')
        self.proxy = proxy
        self.labels = labels
        self.hvs_weight = hvs_weight
        self.hvs_distortion = hvs_distortion

    def __call__(self, x, x_hat):
        task = self.proxy.task_loss(x_hat, self.labels)
        terms = OrderedDict([('loss_task', float(task.data))])
        if self.hvs_weight > 0:
            hvs = self.hvs_distortion(x, x_hat)
            terms['loss_hvs'] = float(hvs.data)
            task = F.add(task, F.mul(hvs, self.hvs_weight))
        return task, terms
