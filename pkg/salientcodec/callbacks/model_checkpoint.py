"""
File: model_checkpoint.py
Description: keeps the last good checkpoint of every phase on disk
"""

from __future__ import absolute_import

from .callback import Callback
from salientcodec.models.checkpoint import save_checkpoint

import os


class ModelCheckpoint(Callback):
    """
        Saves engine.model to <directory>/<phase>.sdhc after every `every`
        epochs and at the end of the phase. The path of the latest save is
        published as engine.last_checkpoint.
    """

    def __init__(self, directory, every: int = 1):
        super(ModelCheckpoint, self).__init__()
        if every < 1:
            raise ValueError(f'every must be at least 1, got {every}')
        self.directory = directory
        self.every = every
        self.saved = {}

    def path_for(self, phase) -> str:
        return os.path.join(self.directory, f'{phase}.sdhc')

    def _save(self, phase, epoch, logs):
        path = self.path_for(phase)
        info = {'phase': phase, 'epoch': epoch}
        info.update((k, v) for k, v in (logs or {}).items() if isinstance(v, (int, float, str)))
        self.saved[phase] = save_checkpoint(path, self.engine.model, info)
        self.engine.last_checkpoint = path

    def on_epoch_end(self, epoch, logs=None):
        if (epoch + 1) % self.every == 0:
            self._save(self.engine.phase, epoch, logs)

    def on_phase_end(self, phase, logs=None):
        self._save(phase, self.engine.epochs - 1, logs)
