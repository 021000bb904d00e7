"""
File: fileio.py
Description: writers that go through a temp file and os.replace onto the target
"""

from __future__ import absolute_import

from contextlib import contextmanager

import os
import tempfile


@contextmanager
def atomic_write(path, mode='wb'):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(prefix='.tmp-', dir=directory)
    try:
        with os.fdopen(fd, mode) as f:
            yield f
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def write_bytes(path, data: bytes):
    with atomic_write(path, 'wb') as f:
        f.write(data)


def write_text(path, text: str):
    with atomic_write(path, 'w') as f:
        f.write(text)
