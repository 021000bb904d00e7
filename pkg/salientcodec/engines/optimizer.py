"""
File: optimizer.py
Description: Adam over the trainable tensors of a ParameterStore
"""

from __future__ import absolute_import

from collections import OrderedDict

from salientcodec.core.parameters import ParameterStore

import numpy as np


class Adam():
    def __init__(self, store: ParameterStore, lr: float = 1e-4, betas=(0.9, 0.999),
                 eps: float = 1e-8):
        if lr <= 0:
            raise ValueError(f'learning rate must be positive, got {lr}')
        if not all(0.0 <= b < 1.0 for b in betas):
            raise ValueError(f'betas must lie in [0, 1), got {betas}')
        self.store = store
        self.lr = lr
        self.betas = tuple(betas)
        self.eps = eps
        self.reset()

    def reset(self):
        """drop the moment estimates, as if freshly constructed"""
        self.t = 0
        self.m = OrderedDict()
        self.v = OrderedDict()

    def zero_grad(self):
        self.store.zero_grad()

    def step(self):
        self.t += 1
        b1, b2 = self.betas
        lr_t = self.lr * np.sqrt(1.0 - b2 ** self.t) / (1.0 - b1 ** self.t)
        for name, param in self.store.items():
            if not param.requires_grad or param.grad is None:
                continue
            g = param.grad
            m = self.m.get(name)
            if m is None:
                m = self.m[name] = np.zeros_like(param.data)
                self.v[name] = np.zeros_like(param.data)
            v = self.v[name]
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            param.data -= lr_t * m / (np.sqrt(v) + self.eps)

    def state_dict(self) -> dict:
        return {'t': self.t,
                'm': {k: a.copy() for k, a in self.m.items()},
                'v': {k: a.copy() for k, a in self.v.items()}}

    def load_state_dict(self, state: dict):
        self.t = state['t']
        self.m = OrderedDict((k, a.copy()) for k, a in state['m'].items())
        self.v = OrderedDict((k, a.copy()) for k, a in state['v'].items())
