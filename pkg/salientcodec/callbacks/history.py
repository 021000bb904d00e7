"""
File: history.py
Description: per-epoch logs of a run, plus where it diverged if it did
"""

from __future__ import absolute_import

from .callback import Callback
from salientcodec.utils.fileio import write_text

import copy
import json


class History(Callback):
    """per-epoch logs of one engine run; engines always attach one and return it from run()"""

    def __init__(self):
        super(History, self).__init__()
        self.history = []
        self.diverged = None

    def on_epoch_end(self, epoch, logs=None):
        logs = logs or {}
        self.history.append(copy.deepcopy(logs))
        self.engine.history = self

    def on_divergence(self, phase, logs=None):
        self.diverged = dict(logs or {}, phase=phase)

    def __len__(self):
        return len(self.history)

    def column(self, key):
        return [logs.get(key) for logs in self.history]

    def dump(self, filepath):
        write_text(filepath, json.dumps(self.history, indent=2))

    @classmethod
    def load(cls, filepath) -> 'History':
        history = cls()
        with open(filepath, 'r') as f:
            history.history = json.load(f)
        return history
