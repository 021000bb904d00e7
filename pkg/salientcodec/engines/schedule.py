"""
File: schedule.py
Description: the two-phase training schedule. Phase 1 trains the codec on
the HVS loss with variance masks; phase 2 starts from the phase-1 weights
and trains on the configured loss with the configured mask source.
"""

from __future__ import absolute_import

from collections import OrderedDict
from typing import List, Sequence

from salientcodec.callbacks import CallbackList, CSVLogger, ModelCheckpoint
from salientcodec.datasets.synthetic import SyntheticScene
from salientcodec.engines.optimizer import Adam
from salientcodec.engines.trainer import (CodecTrainingEngine, ProxyTrainingEngine,
                                          LOSS_KINDS, MASK_SOURCES)
from salientcodec.masks.criteria import DEFAULT_VARIANCE_THRESHOLDS
from salientcodec.models.codec import HierarchicalCodec
from salientcodec.models.config import ModelConfig
from salientcodec.models.proxy import NUM_CLASSES, ProxySegNet
from salientcodec.utils.validation import check_random_state

import os
import configparser

DEFAULT_LAMBDAS = (0.002, 0.008, 0.032, 0.128)
DESK_EPOCHS = (150, 100)
FULL_EPOCHS = (1500, 1000)
SMOKE_EPOCHS = (2, 2)


class TrainingConfig():
    def __init__(self, lmbda: float = DEFAULT_LAMBDAS[1], lambdas: Sequence[float] = DEFAULT_LAMBDAS,
                 lr: float = 1e-4, betas=(0.9, 0.999), eps: float = 1e-8, batch_size: int = 8,
                 epochs_phase1: int = None, epochs_phase2: int = None, full_schedule: bool = False,
                 mask_source: str = 'variance', loss_kind: str = 'vcm', seed: int = 0,
                 crop=(192, 256), hvs_weight: float = 0.0, reset_optimizer: bool = True,
                 proxy_epochs: int = 30, proxy_lr: float = 1e-3,
                 variance_thresholds: Sequence[float] = DEFAULT_VARIANCE_THRESHOLDS,
                 progress: bool = False):
        if lmbda <= 0:
            raise ValueError(f'lambda must be positive, got {lmbda}')
        if not lambdas or any(v <= 0 for v in lambdas):
            raise ValueError(f'every lambda of the sweep must be positive, got {lambdas}')
        if lr <= 0 or proxy_lr <= 0:
            raise ValueError('learning rates must be positive')
        if batch_size < 1:
            raise ValueError(f'batch_size must be at least 1, got {batch_size}')
        if mask_source not in MASK_SOURCES:
            raise ValueError(f'mask_source must be one of {MASK_SOURCES}, got {mask_source!r}')
        if loss_kind not in LOSS_KINDS:
            raise ValueError(f'loss_kind must be one of {LOSS_KINDS}, got {loss_kind!r}')
        if crop is not None and (crop[0] % 64 or crop[1] % 64 or min(crop) < 64):
            raise ValueError(f'crop sides must be positive multiples of 64, got {crop}')
        if hvs_weight < 0:
            raise ValueError(f'hvs_weight must be non-negative, got {hvs_weight}')
        default_epochs = FULL_EPOCHS if full_schedule else DESK_EPOCHS
        self.lmbda = float(lmbda)
        self.lambdas = tuple(float(v) for v in lambdas)
        self.lr = lr
        self.betas = tuple(betas)
        self.eps = eps
        self.batch_size = batch_size
        self.epochs_phase1 = epochs_phase1 if epochs_phase1 is not None else default_epochs[0]
        self.epochs_phase2 = epochs_phase2 if epochs_phase2 is not None else default_epochs[1]
        if self.epochs_phase1 < 1 or self.epochs_phase2 < 0:
            raise ValueError('phase 1 needs at least one epoch and phase 2 a non-negative count')
        self.full_schedule = full_schedule
        self.mask_source = mask_source
        self.loss_kind = loss_kind
        self.seed = seed
        self.crop = tuple(crop) if crop is not None else None
        self.hvs_weight = hvs_weight
        self.reset_optimizer = reset_optimizer
        self.proxy_epochs = proxy_epochs
        self.proxy_lr = proxy_lr
        self.variance_thresholds = tuple(variance_thresholds)
        self.progress = progress

    @classmethod
    def smoke(cls, **kwargs) -> 'TrainingConfig':
        """two epochs per phase on tiny batches"""
        kwargs.setdefault('epochs_phase1', SMOKE_EPOCHS[0])
        kwargs.setdefault('epochs_phase2', SMOKE_EPOCHS[1])
        kwargs.setdefault('proxy_epochs', 2)
        kwargs.setdefault('batch_size', 2)
        kwargs.setdefault('crop', (64, 128))
        return cls(**kwargs)

    def with_lambda(self, lmbda: float) -> 'TrainingConfig':
        data = self.to_dict()
        data['lmbda'] = lmbda
        return TrainingConfig(**data)

    def to_dict(self) -> dict:
        return OrderedDict(vars(self))

    def __repr__(self):
        return (f'TrainingConfig(lambda={self.lmbda}, epochs={self.epochs_phase1}/'
                f'{self.epochs_phase2}, mask={self.mask_source}, loss={self.loss_kind})')


def _parse_pair(text, cast=int):
    parts = [p for p in text.replace('x', ',').split(',') if p.strip()]
    return tuple(cast(p) for p in parts)


def read_config_file(path):
    """read_config_file.
        Parse an INI file with [model], [training] and [data] sections into a
        (ModelConfig, TrainingConfig, data options) triple. Invalid values
        raise ValueError before any work starts.
    """
    parser = configparser.ConfigParser()
    if not parser.read(path):
        raise FileNotFoundError(f'config file {path} not found')
    model_kwargs, training_kwargs = {}, {}
    if parser.has_section('model'):
        section = parser['model']
        for key in ('latent_channels', 'hyper_channels', 'feature_channels'):
            if key in section:
                model_kwargs[key] = section.getint(key)
        if 'scale_bound' in section:
            model_kwargs['scale_bound'] = section.getfloat('scale_bound')
        if section.get('preset') == 'small':
            model_kwargs = dict(ModelConfig.small().to_dict(), **model_kwargs)
    if parser.has_section('training'):
        section = parser['training']
        floats = ('lmbda', 'lr', 'eps', 'hvs_weight', 'proxy_lr')
        ints = ('batch_size', 'epochs_phase1', 'epochs_phase2', 'seed', 'proxy_epochs')
        bools = ('full_schedule', 'reset_optimizer', 'progress')
        for key in section:
            if key == 'lambda':
                training_kwargs['lmbda'] = section.getfloat(key)
            elif key in floats:
                training_kwargs[key] = section.getfloat(key)
            elif key in ints:
                training_kwargs[key] = section.getint(key)
            elif key in bools:
                training_kwargs[key] = section.getboolean(key)
            elif key in ('mask_source', 'loss_kind'):
                training_kwargs[key] = section.get(key)
            elif key == 'lambdas':
                training_kwargs[key] = _parse_pair(section.get(key), float)
            elif key == 'crop':
                training_kwargs[key] = _parse_pair(section.get(key))
            elif key == 'variance_thresholds':
                training_kwargs[key] = _parse_pair(section.get(key), float)
            else:
                raise ValueError(f'unknown [training] option {key!r}')
    data = dict(parser['data']) if parser.has_section('data') else {}
    return ModelConfig(**model_kwargs), TrainingConfig(**training_kwargs), data


class ScheduleResult():
    """trained codec, per-phase model hashes and the concatenated epoch logs"""

    def __init__(self, codec: HierarchicalCodec, proxy: ProxySegNet, logs: List[dict],
                 hashes: dict):
        self.codec = codec
        self.proxy = proxy
        self.logs = logs
        self.hashes = hashes

    @property
    def store(self):
        return self.codec.store

    def __repr__(self):
        return f'ScheduleResult({len(self.logs)} epochs, hashes={self.hashes})'


def _callbacks(config: TrainingConfig, output_dir, extra=None) -> CallbackList:
    callbacks = list(extra or [])
    if output_dir is not None:
        callbacks.append(CSVLogger(os.path.join(output_dir, 'training_log.csv')))
        callbacks.append(ModelCheckpoint(output_dir))
    return CallbackList(callbacks, add_history=True, add_progbar=config.progress)


def pretrain_proxy(scenes: Sequence[SyntheticScene], config: TrainingConfig,
                   num_classes: int = NUM_CLASSES, proxy: ProxySegNet = None,
                   random_state=None) -> ProxySegNet:
    """fit the proxy network on uncompressed scenes, then freeze it"""
    random_state = check_random_state(config.seed if random_state is None else random_state)
    proxy = proxy or ProxySegNet(num_classes, random_state=random_state)
    proxy.unfreeze()
    if config.proxy_epochs > 0:
        engine = ProxyTrainingEngine(proxy, scenes, Adam(proxy.store, config.proxy_lr),
                                     config.proxy_epochs, batch_size=config.batch_size,
                                     crop=config.crop, phase='proxy',
                                     callbacks=CallbackList(add_history=True,
                                                            add_progbar=config.progress),
                                     random_state=random_state)
        engine.run()
    proxy.freeze()
    return proxy


def train_schedule(dataset: Sequence[SyntheticScene], config: TrainingConfig,
                   model_config: ModelConfig = None, proxy: ProxySegNet = None,
                   output_dir=None, callbacks=None) -> ScheduleResult:
    """train_schedule.
        Phase 1: HVS loss with variance masks. Phase 2: config.loss_kind with
        config.mask_source, initialised from the phase-1 weights. A NaN loss
        aborts with DivergenceError after restoring the last good parameters;
        with an output_dir the last good checkpoint stays on disk.

    Args:
        dataset: training scenes
        config: TrainingConfig
        model_config: codec architecture, ModelConfig() when omitted
        proxy: frozen ProxySegNet; pretrained here when task-loss training needs one
        output_dir: directory for training_log.csv and the phase checkpoints
        callbacks: extra callbacks attached to both phases
    """
    if not dataset:
        raise ValueError('the training set is empty')
    random_state = check_random_state(config.seed)
    codec = HierarchicalCodec(model_config or ModelConfig(), random_state=random_state)
    if config.loss_kind == 'vcm' and config.epochs_phase2 > 0 and proxy is None:
        proxy = pretrain_proxy(dataset, config, random_state=random_state)

    hashes = OrderedDict([('init', codec.store.hexdigest())])
    optimizer = Adam(codec.store, config.lr, config.betas, config.eps)
    history_cb = _callbacks(config, output_dir, callbacks)

    phase1 = CodecTrainingEngine(codec, dataset, config.lmbda, optimizer, config.epochs_phase1,
                                 loss_kind='hvs', mask_source='variance',
                                 variance_thresholds=config.variance_thresholds,
                                 batch_size=config.batch_size, crop=config.crop,
                                 callbacks=history_cb, phase='phase1', random_state=random_state)
    history = phase1.run()
    hashes['phase1'] = codec.store.hexdigest()

    if config.epochs_phase2 > 0:
        if config.reset_optimizer:
            optimizer.reset()
        phase2 = CodecTrainingEngine(codec, dataset, config.lmbda, optimizer, config.epochs_phase2,
                                     loss_kind=config.loss_kind, mask_source=config.mask_source,
                                     proxy=proxy, hvs_weight=config.hvs_weight,
                                     variance_thresholds=config.variance_thresholds,
                                     batch_size=config.batch_size, crop=config.crop,
                                     callbacks=history_cb, phase='phase2',
                                     random_state=random_state)
        history = phase2.run()
        hashes['phase2'] = codec.store.hexdigest()
    logs = list(history.history) if history is not None else []
    return ScheduleResult(codec, proxy, logs, hashes)


def sweep_lambdas(dataset: Sequence[SyntheticScene], config: TrainingConfig,
                  model_config: ModelConfig = None, proxy: ProxySegNet = None,
                  output_dir=None) -> List[ScheduleResult]:
    """one training run per lambda of config.lambdas, sharing the proxy"""
    if config.loss_kind == 'vcm' and proxy is None and config.epochs_phase2 > 0:
        proxy = pretrain_proxy(dataset, config)
    results = []
    for i, lmbda in enumerate(config.lambdas):
        run_dir = os.path.join(output_dir, f'lambda{i}') if output_dir is not None else None
        results.append(train_schedule(dataset, config.with_lambda(lmbda), model_config,
                                      proxy, run_dir))
    return results
