"""
File: progbar_logger.py
Description: tqdm progress bar over the epochs of a phase
"""

from __future__ import absolute_import

from collections import OrderedDict
from tqdm import tqdm

from .callback import Callback


class ProgbarLogger(Callback):
    def __init__(self, metrics=None, default_metrics=True, keys=('loss_total', 'bpp_estimate')):
        super(ProgbarLogger, self).__init__()
        self.metrics = metrics or {}
        self.default_metrics = default_metrics
        self.keys = keys
        self.progbar = None

    def on_phase_begin(self, phase, logs=None):
        self.progbar = tqdm(total=self.engine.epochs, desc=str(phase))

    def on_epoch_end(self, epoch, logs=None):
        self._update_metrics()
        self.progbar.set_postfix(self.metrics, refresh=True)
        self.progbar.update()

    def on_phase_end(self, phase, logs=None):
        if self.progbar is not None:
            self.progbar.close()
            self.progbar = None

    def on_divergence(self, phase, logs=None):
        if self.progbar is not None:
            self.progbar.set_postfix_str(f'diverged at epoch {(logs or {}).get("epoch")}')
        self.on_phase_end(phase, logs)

    def _update_metrics(self):
        self.metrics = self.metrics or OrderedDict()
        if self.default_metrics and self.engine.metrics:
            if not isinstance(self.engine.metrics, (dict, OrderedDict)):
                raise TypeError(
                    f'engine.metrics (type : {type(self.engine.metrics).__name__}) has be an instance of Dict or OrderedDict')
            self.metrics.update((k, v) for k, v in self.engine.metrics.items()
                                if not self.keys or k in self.keys)
