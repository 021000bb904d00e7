"""
File: callback_list.py
Description: fans every engine hook out to the registered callbacks in order
"""

from __future__ import absolute_import

from typing import List, Optional

from .callback import Callback
from .history import History
from .progbar_logger import ProgbarLogger


class CallbackList():
    def __init__(self, callbacks: List[Callback] = None, add_history=False, add_progbar=False):
        self.callbacks = list(callbacks) if callbacks else []
        self.engine = None
        self.params = None
        self._history = next((cb for cb in self.callbacks if isinstance(cb, History)), None)
        if self._history is None and add_history:
            self._history = History()
            self.callbacks.append(self._history)
        if add_progbar and not any(isinstance(cb, ProgbarLogger) for cb in self.callbacks):
            self.callbacks.append(ProgbarLogger())

    @property
    def history(self) -> Optional[History]:
        return self._history

    def __iter__(self):
        return iter(self.callbacks)

    def __len__(self):
        return len(self.callbacks)

    def append(self, callback: Callback):
        if isinstance(callback, History) and self._history is None:
            self._history = callback
        if self.engine is not None:
            callback.set_engine(self.engine)
        self.callbacks.append(callback)

    def set_params(self, params):
        self.params = params
        self._dispatch('set_params', params)

    def set_engine(self, engine):
        self.engine = engine
        self._dispatch('set_engine', engine)

    def _dispatch(self, hook, *args):
        for callback in self.callbacks:
            getattr(callback, hook)(*args)

    def on_running_begin(self, logs=None):
        self._dispatch('on_running_begin', logs or {})

    def on_running_end(self, logs=None):
        self._dispatch('on_running_end', logs or {})

    def on_phase_begin(self, phase, logs=None):
        self._dispatch('on_phase_begin', phase, logs or {})

    def on_phase_end(self, phase, logs=None):
        self._dispatch('on_phase_end', phase, logs or {})

    def on_epoch_begin(self, epoch, logs=None):
        self._dispatch('on_epoch_begin', epoch, logs or {})

    def on_epoch_end(self, epoch, logs=None):
        self._dispatch('on_epoch_end', epoch, logs or {})

    def on_batch_begin(self, batch, logs=None):
        self._dispatch('on_batch_begin', batch, logs or {})

    def on_batch_end(self, batch, logs=None):
        self._dispatch('on_batch_end', batch, logs or {})

    def on_divergence(self, phase, logs=None):
        self._dispatch('on_divergence', phase, logs or {})
