"""
File: runtime.py
Description: process-wide numeric mode. Reference mode computes in float64 and is
             what every correctness test runs in; fast mode uses float32.
"""

from __future__ import absolute_import

from contextlib import contextmanager

import os
import numpy as np

_reference_mode = True

DEFAULT_THREADS = 1


def set_reference_mode(flag: bool = True):
    global _reference_mode
    _reference_mode = bool(flag)


def is_reference_mode() -> bool:
    return _reference_mode


def get_dtype():
    return np.float64 if _reference_mode else np.float32


@contextmanager
def reference_mode(flag: bool = True):
    previous = _reference_mode
    set_reference_mode(flag)
    try:
        yield
    finally:
        set_reference_mode(previous)


def max_threads() -> int:
    """Worker cap for batch commands, taken from SDVC_THREADS"""
    value = os.environ.get('SDVC_THREADS')
    if value is None:
        return DEFAULT_THREADS
    try:
        threads = int(value)
    except ValueError:
        raise ValueError(f'SDVC_THREADS has to be an integer, got {value!r}')
    return max(1, threads)
