"""
File: trainer.py
Description: epoch / batch run loop with callbacks. A batch is processed one
image at a time with gradients accumulated at weight 1 / batch size, which
lets every image carry its own saliency mask.
"""

from __future__ import absolute_import

from abc import ABC, abstractmethod
from collections import OrderedDict
from typing import List, Sequence, Tuple

from salientcodec.callbacks import CallbackList, Callback, History
from salientcodec.core.tensor import Tensor
from salientcodec.datasets.synthetic import SyntheticScene
from salientcodec.engines.losses import loss_hvs, loss_vcm
from salientcodec.engines.optimizer import Adam
from salientcodec.masks.criteria import DEFAULT_VARIANCE_THRESHOLDS, gt_mask, variance_mask
from salientcodec.masks.saliency_mask import CELL_SIZE
from salientcodec.models.codec import HierarchicalCodec, image_to_tensor
from salientcodec.models.latents import LossBreakdown
from salientcodec.models.proxy import ProxySegNet
from salientcodec.utils.errors import DivergenceError
from salientcodec.utils.validation import check_random_state

import numpy as np

LOSS_KINDS = ('hvs', 'vcm')
MASK_SOURCES = ('variance', 'gt')


def random_crop(scene: SyntheticScene, crop: Tuple[int, int], random_state=None,
                align: int = CELL_SIZE) -> SyntheticScene:
    """crop at an offset on the cell grid; the whole scene when crop is None"""
    if crop is None:
        return scene
    random_state = check_random_state(random_state)
    height, width = crop
    if height > scene.shape[0] or width > scene.shape[1]:
        raise ValueError(f'crop {crop} is larger than the {scene.shape} scene')
    top = align * random_state.randint(0, (scene.shape[0] - height) // align + 1)
    left = align * random_state.randint(0, (scene.shape[1] - width) // align + 1)
    return scene.crop(top, left, height, width)


class TrainingEngine(ABC):
    def __init__(self, model, dataset: Sequence[SyntheticScene], optimizer: Adam,
                 epochs: int, batch_size: int = 8, crop: Tuple[int, int] = None,
                 callbacks: List[Callback] = None, phase: str = 'train', random_state=None):
        if not dataset:
            raise ValueError('the training set is empty')
        if batch_size < 1:
            raise ValueError(f'batch_size must be at least 1, got {batch_size}')
        if epochs < 1:
            raise ValueError(f'epochs must be at least 1, got {epochs}')
        self.model = model
        self.dataset = list(dataset)
        self.optimizer = optimizer
        self.epochs = epochs
        self.batch_size = batch_size
        self.crop = crop
        self.phase = phase
        self.random_state = check_random_state(random_state)
        self.callbacks = callbacks if isinstance(callbacks, CallbackList) else \
            CallbackList(callbacks, add_history=True)
        self.callbacks.set_engine(self)
        self.metrics = None
        self.history = None
        self.stop_running = False
        self.last_good = None
        self.last_checkpoint = None

    @abstractmethod
    def compute_loss(self, sample: SyntheticScene) -> LossBreakdown:
        pass

    def make_batches(self) -> List[List[SyntheticScene]]:
        order = self.random_state.permutation(len(self.dataset))
        samples = [random_crop(self.dataset[i], self.crop, self.random_state) for i in order]
        return [samples[i:i + self.batch_size] for i in range(0, len(samples), self.batch_size)]

    def _diverged(self, epoch, batch, what):
        self.model.store.assign(self.last_good)
        self.callbacks.on_divergence(self.phase, OrderedDict([('epoch', epoch), ('batch', batch),
                                                              ('reason', what)]))
        raise DivergenceError(f'{what} at phase {self.phase!r}, epoch {epoch}, batch {batch}; '
                              f'parameters restored to the last good state',
                              checkpoint=self.last_checkpoint)

    def train_step(self, samples: List[SyntheticScene], epoch: int, batch: int) -> dict:
        self.optimizer.zero_grad()
        weight = 1.0 / len(samples)
        terms = OrderedDict()
        for sample in samples:
            loss = self.compute_loss(sample)
            if not np.isfinite(loss.total.data):
                self._diverged(epoch, batch, 'non-finite loss')
            if loss.total.requires_grad:
                loss.total.backward(np.asarray(weight))
            for key, value in loss.as_dict().items():
                terms[key] = terms.get(key, 0.0) + weight * value
        self.optimizer.step()
        if not self.model.store.all_finite():
            self._diverged(epoch, batch, 'non-finite parameters')
        return terms

    def _update_metrics(self, totals: dict, count: int) -> None:
        self.metrics = OrderedDict((k, v / count) for k, v in totals.items())

    def _update_logs(self, logs, epoch):
        logs = OrderedDict([('epoch', epoch), ('phase', self.phase)])
        logs.update(self.metrics or OrderedDict())
        return logs

    def run(self, epochs: int = None) -> History:
        if epochs is not None:
            self.epochs = epochs

        logs = None
        self.callbacks.on_running_begin(logs=logs)
        self.callbacks.on_phase_begin(self.phase, logs=logs)
        self.last_good = self.model.store.copy()

        for epoch in range(self.epochs):
            self.callbacks.on_epoch_begin(epoch, logs=logs)

            totals, count = OrderedDict(), 0
            for b, samples in enumerate(self.make_batches()):
                self.callbacks.on_batch_begin(b, logs=logs)
                batch_logs = self.train_step(samples, epoch, b)
                for key, value in batch_logs.items():
                    totals[key] = totals.get(key, 0.0) + value
                count += 1
                self.callbacks.on_batch_end(b, logs=batch_logs)

            self._update_metrics(totals, count)
            logs = self._update_logs(logs, epoch)
            self.last_good = self.model.store.copy()

            self.callbacks.on_epoch_end(epoch, logs=logs)

            if self.stop_running:
                break

        self.callbacks.on_phase_end(self.phase, logs=logs)
        self.callbacks.on_running_end(logs=logs)

        return self.history


class CodecTrainingEngine(TrainingEngine):
    """rate-distortion training of a HierarchicalCodec under the HVS or the task loss"""

    def __init__(self, codec: HierarchicalCodec, dataset: Sequence[SyntheticScene], lmbda: float,
                 optimizer: Adam = None, epochs: int = 1, loss_kind: str = 'hvs',
                 mask_source: str = 'variance', proxy: ProxySegNet = None,
                 hvs_weight: float = 0.0, variance_thresholds=DEFAULT_VARIANCE_THRESHOLDS,
                 **kwargs):
        if lmbda <= 0:
            raise ValueError(f'lambda must be positive, got {lmbda}')
        if loss_kind not in LOSS_KINDS:
            raise ValueError(f'loss_kind must be one of {LOSS_KINDS}, got {loss_kind!r}')
        if mask_source not in MASK_SOURCES:
            raise ValueError(f'mask_source must be one of {MASK_SOURCES}, got {mask_source!r}')
        if loss_kind == 'vcm' and proxy is None:
            raise ValueError('task-loss training needs a proxy network')
        super(CodecTrainingEngine, self).__init__(codec, dataset, optimizer or Adam(codec.store),
                                                  epochs, **kwargs)
        self.lmbda = lmbda
        self.loss_kind = loss_kind
        self.mask_source = mask_source
        self.proxy = proxy
        self.hvs_weight = hvs_weight
        self.variance_thresholds = variance_thresholds

    def mask_for(self, sample: SyntheticScene):
        if self.mask_source == 'gt':
            return gt_mask(sample.annotation, sample.shape)
        return variance_mask(sample.image, self.variance_thresholds)

    def compute_loss(self, sample):
        x = image_to_tensor(sample.image)
        m = self.mask_for(sample)
        if self.loss_kind == 'hvs':
            return loss_hvs(self.model, x, m, self.lmbda, self.random_state)
        return loss_vcm(self.model, x, m, self.lmbda, self.proxy, sample.labels[None],
                        self.hvs_weight, self.random_state)


class ProxyTrainingEngine(TrainingEngine):
    """fits the proxy segmentation network on uncompressed scenes"""

    def __init__(self, proxy: ProxySegNet, dataset: Sequence[SyntheticScene],
                 optimizer: Adam = None, epochs: int = 1, **kwargs):
        super(ProxyTrainingEngine, self).__init__(proxy, dataset, optimizer or Adam(proxy.store, 1e-3),
                                                  epochs, **kwargs)

    def compute_loss(self, sample):
        task = self.model.task_loss(image_to_tensor(sample.image), sample.labels[None])
        return LossBreakdown(task, Tensor(0.0), 0.0, {'loss_task': float(task.data)})
