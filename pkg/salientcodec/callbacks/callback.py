"""
File: callback.py
Description: hooks a training engine calls while it runs
"""

from __future__ import absolute_import


class Callback(object):
    """
        Base class of the training hooks. An engine runs one phase at a time:
        on_running_begin, on_phase_begin, then per epoch on_epoch_begin, the
        batch hooks and on_epoch_end, and finally on_phase_end and
        on_running_end. A non-finite loss or parameter calls on_divergence
        after the engine has restored its last good parameters; the phase
        hooks are not called afterwards.
    """

    def __init__(self):
        self.engine = None
        self.params = None

    def set_engine(self, engine):
        self.engine = engine

    def set_params(self, params):
        self.params = params

    def on_running_begin(self, logs=None):
        pass

    def on_running_end(self, logs=None):
        pass

    def on_phase_begin(self, phase, logs=None):
        pass

    def on_phase_end(self, phase, logs=None):
        pass

    def on_epoch_begin(self, epoch, logs=None):
        pass

    def on_epoch_end(self, epoch, logs=None):
        pass

    def on_batch_begin(self, batch, logs=None):
        pass

    def on_batch_end(self, batch, logs=None):
        pass

    def on_divergence(self, phase, logs=None):
        pass
