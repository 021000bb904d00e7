"""
File: gradcheck.py
Description: central finite differences against reverse-mode gradients
"""

from __future__ import absolute_import

from typing import Callable, List, Tuple, Union

from salientcodec.runtime import is_reference_mode
from salientcodec.core.parameters import ParameterStore
from salientcodec.core.tensor import Tensor, no_grad
from salientcodec.utils.validation import check_random_state

import numpy as np

MAX_SAMPLES = 1000


class GradCheckReport():
    def __init__(self, max_rel_error: float, n_checked: int, worst: Tuple[str, int],
                 analytic: np.ndarray, numeric: np.ndarray):
        self.max_rel_error = max_rel_error
        self.n_checked = n_checked
        self.worst = worst
        self.analytic = analytic
        self.numeric = numeric

    def passed(self, tolerance: float) -> bool:
        return self.max_rel_error < tolerance

    def __repr__(self):
        return (f'GradCheckReport(max_rel_error={self.max_rel_error:.3e}, '
                f'n_checked={self.n_checked}, worst={self.worst})')


def _named_tensors(params) -> List[Tuple[str, Tensor]]:
    if isinstance(params, ParameterStore):
        return list(params.items())
    if isinstance(params, Tensor):
        return [(params.name or 'tensor', params)]
    return [(t.name or f'tensor{i}', t) for i, t in enumerate(params)]


def grad_check(loss_fn: Callable[[], Tensor],
               params: Union[ParameterStore, Tensor, List[Tensor]],
               n_samples: int = MAX_SAMPLES, h: float = 1e-5,
               floor: float = 1e-5, random_state=None) -> GradCheckReport:
    """grad_check.
        loss_fn rebuilds the graph from the current parameter values and
        returns a scalar; it has to be deterministic (fix any noise outside).
        Relative error is |a - n| / max(|a|, |n|, floor).

    Args:
        loss_fn: closure returning the scalar loss
        params: tensors to perturb
        n_samples: parameters sampled, at most 1000
        h: finite difference step
        floor: denominator floor for near-zero gradients
        random_state: sampling seed
    """
    if not is_reference_mode():
        raise RuntimeError('grad_check needs reference (float64) mode')
    random_state = check_random_state(random_state)
    named = _named_tensors(params)
    n_samples = min(n_samples, MAX_SAMPLES)

    for _, t in named:
        t.zero_grad()
    loss = loss_fn()
    if loss.requires_grad:
        loss.backward()
    grads = {name: (t.grad if t.grad is not None else np.zeros_like(t.data)) for name, t in named}

    sizes = np.array([t.size for _, t in named])
    total = int(sizes.sum())
    picks = random_state.choice(total, size=min(n_samples, total), replace=False)
    picks.sort()
    offsets = np.concatenate([[0], np.cumsum(sizes)])

    analytic, numeric, worst, max_err = [], [], None, 0.0
    with no_grad():
        for flat in picks:
            k = int(np.searchsorted(offsets, flat, side='right') - 1)
            name, t = named[k]
            index = np.unravel_index(int(flat - offsets[k]), t.shape)
            original = t.data[index]
            t.data[index] = original + h
            f_plus = float(loss_fn().data)
            t.data[index] = original - h
            f_minus = float(loss_fn().data)
            t.data[index] = original
            num = (f_plus - f_minus) / (2.0 * h)
            ana = float(grads[name][index])
            err = abs(ana - num) / max(abs(ana), abs(num), floor)
            analytic.append(ana)
            numeric.append(num)
            if err >= max_err:
                max_err, worst = err, (name, int(flat - offsets[k]))
    return GradCheckReport(max_err, len(picks), worst, np.array(analytic), np.array(numeric))
