from salientcodec.callbacks import ModelCheckpoint
from salientcodec.core.tensor import Tensor
from salientcodec.datasets.synthetic import make_synthetic_dataset
from salientcodec.engines.trainer import CodecTrainingEngine, TrainingEngine, random_crop
from salientcodec.models.latents import LossBreakdown
from salientcodec.models.proxy import ProxySegNet
from salientcodec.utils.errors import DivergenceError

import os
import pytest
import numpy as np


@pytest.fixture(scope='module')
def scenes():
    return make_synthetic_dataset(2, seed=0, height=64, width=128)


class ScriptedEngine(TrainingEngine):
    """constant losses; a NaN once `fail_at` losses have been computed"""

    def __init__(self, *args, fail_at=None, **kwargs):
        super(ScriptedEngine, self).__init__(*args, **kwargs)
        self.fail_at = fail_at
        self.calls = 0

    def compute_loss(self, sample):
        self.calls += 1
        value = np.nan if self.fail_at is not None and self.calls > self.fail_at else 1.0
        return LossBreakdown(Tensor(value), Tensor(0.0), 0.0)


def test_random_crop_is_cell_aligned(rng):
    scene = make_synthetic_dataset(1, seed=1, height=192, width=256)[0]
    assert random_crop(scene, None) is scene
    for _ in range(10):
        crop = random_crop(scene, (64, 128), rng)
        assert crop.shape == (64, 128)
    with pytest.raises(ValueError):
        random_crop(scene, (256, 64), rng)


def test_engine_validation(small_codec, scenes):
    with pytest.raises(ValueError):
        CodecTrainingEngine(small_codec, scenes, 0.0)
    with pytest.raises(ValueError):
        CodecTrainingEngine(small_codec, scenes, 0.01, loss_kind='mse')
    with pytest.raises(ValueError):
        CodecTrainingEngine(small_codec, scenes, 0.01, mask_source='detections')
    with pytest.raises(ValueError):
        CodecTrainingEngine(small_codec, scenes, 0.01, loss_kind='vcm')
    with pytest.raises(ValueError):
        CodecTrainingEngine(small_codec, [], 0.01)


def test_one_epoch_updates_the_codec(small_codec, scenes):
    before = small_codec.store.hexdigest()
    engine = CodecTrainingEngine(small_codec, scenes, 0.01, epochs=1, batch_size=2,
                                 random_state=0)
    with pytest.warns(UserWarning):
        history = engine.run()
    assert len(history) == 1
    logs = history.history[0]
    assert logs['epoch'] == 0 and logs['phase'] == 'train'
    assert np.isfinite(logs['loss_total'])
    assert small_codec.store.hexdigest() != before


def test_vcm_engine_uses_gt_masks(small_codec, scenes):
    proxy = ProxySegNet(4, random_state=0)
    proxy.freeze()
    engine = CodecTrainingEngine(small_codec, scenes, 0.01, epochs=1, loss_kind='vcm',
                                 mask_source='gt', proxy=proxy, random_state=0)
    assert engine.mask_for(scenes[0]).shape == (1, 2)
    history = engine.run()
    assert 'loss_task' in history.history[0]
    assert proxy.store.hexdigest() == ProxySegNet(4, random_state=0).store.hexdigest()


def test_divergence_restores_the_last_good_state(small_codec, scenes, tmp_path):
    engine = ScriptedEngine(small_codec, scenes, None, epochs=3, batch_size=1, fail_at=2,
                            callbacks=[ModelCheckpoint(str(tmp_path))], phase='phase1')
    engine.optimizer = type('Frozen', (), {'zero_grad': lambda self: None,
                                           'step': lambda self: None})()
    good = small_codec.store.hexdigest()
    with pytest.raises(DivergenceError) as info:
        engine.run()
    assert 'epoch 1' in str(info.value)
    assert small_codec.store.hexdigest() == good
    assert info.value.checkpoint == os.path.join(str(tmp_path), 'phase1.sdhc')
    assert os.path.exists(info.value.checkpoint)
    assert engine.callbacks.history.diverged == {'epoch': 1, 'batch': 0, 'reason': 'non-finite loss',
                                                'phase': 'phase1'}
