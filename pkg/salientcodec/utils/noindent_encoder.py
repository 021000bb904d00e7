"""
File: noindent_encoder.py
Description: JSON encoder for config snapshots and reports; short lists stay on one line
"""
from __future__ import absolute_import

import json
import uuid

import numpy as np


class NoIndent(object):
    def __init__(self, value):
        self.value = value


class NoIndentEncoder(json.JSONEncoder):
    def __init__(self, *args, **kwargs):
        super(NoIndentEncoder, self).__init__(*args, **kwargs)
        self.kwargs = dict(kwargs)
        self.kwargs.pop('indent', None)
        self._replacement_map = {}

    def default(self, o):
        if isinstance(o, NoIndent):
            key = uuid.uuid4().hex
            self._replacement_map[key] = json.dumps(o.value, **self.kwargs)
            return "@@%s@@" % (key,)
        if isinstance(o, np.integer):
            return int(o)
        if isinstance(o, np.floating):
            return float(o)
        if isinstance(o, np.ndarray):
            return o.tolist()
        return super(NoIndentEncoder, self).default(o)

    def encode(self, o):
        result = super(NoIndentEncoder, self).encode(o)
        for k, v in self._replacement_map.items():
            result = result.replace('"@@%s@@"' % (k,), v)
        return result


def dumps_snapshot(data: dict) -> str:
    """dumps_snapshot.
        Serialize a config snapshot deterministically (sorted keys, inline lists)
    """
    def wrap(value):
        if isinstance(value, dict):
            return {k: wrap(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return NoIndent(list(value))
        return value
    return json.dumps(wrap(data), cls=NoIndentEncoder, indent=2, sort_keys=True)
