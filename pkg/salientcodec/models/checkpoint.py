"""
File: checkpoint.py
Description: checkpoints are a ParameterStore file (.sdhc) plus a JSON
snapshot next to it holding the model config, the model hash and whatever
training info the caller wants to keep.
"""

from __future__ import absolute_import

from collections import OrderedDict
from typing import Tuple, Union

from salientcodec.core.parameters import ParameterStore
from salientcodec.models.codec import HierarchicalCodec
from salientcodec.models.config import ModelConfig
from salientcodec.models.proxy import ProxySegNet
from salientcodec.utils.errors import CorruptionError, FormatError, InputError, ModelError
from salientcodec.utils.fileio import write_text
from salientcodec.utils.noindent_encoder import dumps_snapshot

import os
import json

CHECKPOINT_EXT = '.sdhc'
SNAPSHOT_EXT = '.json'


def snapshot_path(path) -> str:
    root, ext = os.path.splitext(str(path))
    return (root if ext == CHECKPOINT_EXT else str(path)) + SNAPSHOT_EXT


def save_checkpoint(path, model: Union[HierarchicalCodec, ProxySegNet], info: dict = None) -> str:
    """write parameters, then the snapshot; returns the model hash in hex"""
    snapshot = OrderedDict()
    if isinstance(model, HierarchicalCodec):
        snapshot['kind'] = 'codec'
        snapshot['model'] = model.config.to_dict()
    elif isinstance(model, ProxySegNet):
        snapshot['kind'] = 'proxy'
        snapshot['model'] = {'num_classes': model.num_classes}
    else:
        raise TypeError(f'cannot checkpoint a {type(model).__name__}')
    snapshot['hash'] = model.store.hexdigest()
    snapshot['info'] = dict(info or {})
    model.store.save(path)
    write_text(snapshot_path(path), dumps_snapshot(snapshot))
    return snapshot['hash']


def read_snapshot(path) -> dict:
    sidecar = snapshot_path(path)
    try:
        with open(sidecar, 'r') as f:
            return json.load(f)
    except FileNotFoundError:
        raise ModelError(f'checkpoint snapshot {sidecar} is missing')
    except json.JSONDecodeError as e:
        raise ModelError(f'checkpoint snapshot {sidecar} is not valid JSON: {e}')


def _load_store(path) -> ParameterStore:
    try:
        return ParameterStore.load(path)
    except FileNotFoundError:
        raise InputError(f'checkpoint {path} does not exist')
    except (FormatError, CorruptionError) as e:
        raise ModelError(f'checkpoint {path} is unreadable: {e}')


def load_checkpoint(path, kind: str = 'codec') -> Tuple[Union[HierarchicalCodec, ProxySegNet], dict]:
    """load_checkpoint.
        Rebuild the model from its snapshot and copy the stored parameters in.
        A layout or hash disagreement raises ModelError.

    Args:
        path: .sdhc file
        kind: 'codec' or 'proxy'
    """
    snapshot = read_snapshot(path)
    if snapshot.get('kind') != kind:
        raise ModelError(f'{path} holds a {snapshot.get("kind")!r} model, expected {kind!r}')
    store = _load_store(path)
    if kind == 'codec':
        try:
            config = ModelConfig.from_dict(snapshot['model'])
        except (KeyError, TypeError, ValueError) as e:
            raise ModelError(f'checkpoint config is invalid: {e}')
        model = HierarchicalCodec(config)
    else:
        model = ProxySegNet(snapshot['model']['num_classes'])
    if store.hexdigest() != snapshot.get('hash'):
        raise ModelError(f'parameters of {path} do not match the recorded model hash')
    model.store.assign(store)
    return model, snapshot.get('info', {})
