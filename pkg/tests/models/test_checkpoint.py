from salientcodec.models.checkpoint import (load_checkpoint, read_snapshot, save_checkpoint,
                                            snapshot_path)
from salientcodec.models.codec import HierarchicalCodec
from salientcodec.models.config import ModelConfig
from salientcodec.models.proxy import ProxySegNet
from salientcodec.utils.errors import ModelError
from salientcodec.utils.fileio import write_text

import json
import pytest


def test_snapshot_path():
    assert snapshot_path('run/model.sdhc') == 'run/model.json'
    assert snapshot_path('run/model') == 'run/model.json'


def test_codec_round_trip(small_codec, tmp_path):
    path = tmp_path / 'model.sdhc'
    digest = save_checkpoint(path, small_codec, {'epoch': 3})
    assert digest == small_codec.store.hexdigest()
    codec, info = load_checkpoint(path)
    assert isinstance(codec, HierarchicalCodec)
    assert codec.digest() == small_codec.digest()
    assert codec.config == small_codec.config
    assert info == {'epoch': 3}


def test_proxy_round_trip(tmp_path):
    proxy = ProxySegNet(3, random_state=1)
    path = tmp_path / 'proxy.sdhc'
    save_checkpoint(path, proxy)
    loaded, _ = load_checkpoint(path, kind='proxy')
    assert loaded.num_classes == 3
    assert loaded.digest() == proxy.digest()


def test_kind_mismatch(small_codec, tmp_path):
    path = tmp_path / 'model.sdhc'
    save_checkpoint(path, small_codec)
    with pytest.raises(ModelError):
        load_checkpoint(path, kind='proxy')


def test_hash_mismatch(small_codec, tmp_path):
    path = tmp_path / 'model.sdhc'
    save_checkpoint(path, small_codec)
    snapshot = read_snapshot(path)
    snapshot['hash'] = '0' * 16
    write_text(snapshot_path(path), json.dumps(snapshot))
    with pytest.raises(ModelError):
        load_checkpoint(path)


def test_missing_or_damaged_files(small_codec, tmp_path):
    with pytest.raises(ModelError):
        load_checkpoint(tmp_path / 'absent.sdhc')
    path = tmp_path / 'model.sdhc'
    save_checkpoint(path, small_codec)
    data = path.read_bytes()
    path.write_bytes(data[:len(data) // 2])
    with pytest.raises(ModelError):
        load_checkpoint(path)


def test_architecture_mismatch(small_codec, tmp_path):
    path = tmp_path / 'model.sdhc'
    save_checkpoint(path, small_codec)
    snapshot = read_snapshot(path)
    snapshot['model'] = ModelConfig(latent_channels=16, hyper_channels=4,
                                    feature_channels=12).to_dict()
    write_text(snapshot_path(path), json.dumps(snapshot))
    with pytest.raises(ModelError):
        load_checkpoint(path)


def test_only_models_are_checkpointed(tmp_path):
    with pytest.raises(TypeError):
        save_checkpoint(tmp_path / 'x.sdhc', object())
