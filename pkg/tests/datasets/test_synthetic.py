from salientcodec.datasets.synthetic import (OBJECT_FRACTION, SyntheticScene, make_scene,
                                             make_synthetic_dataset, simulate_detections)
from salientcodec.masks.criteria import AnnotationMap

import pytest
import numpy as np


@pytest.fixture(scope='module')
def scenes():
    return make_synthetic_dataset(4, seed=11)


def test_same_seed_same_scenes(scenes):
    again = make_synthetic_dataset(4, seed=11)
    for a, b in zip(scenes, again):
        np.testing.assert_array_equal(a.image, b.image)
        np.testing.assert_array_equal(a.annotation.instances, b.annotation.instances)
        assert a.annotation.classes == b.annotation.classes
    other = make_synthetic_dataset(1, seed=12)[0]
    assert not np.array_equal(other.image, scenes[0].image)


def test_scene_contents(scenes):
    low, high = OBJECT_FRACTION
    for scene in scenes:
        assert scene.shape == (256, 512)
        assert scene.image.min() >= 0.0 and scene.image.max() <= 1.0
        assert low <= scene.object_fraction() <= high
        assert set(scene.annotation.classes.values()) <= {1, 2, 3}
        assert set(scene.annotation.classes) == set(scene.annotation.instance_ids())
        assert set(np.unique(scene.labels)) <= {0, 1, 2, 3}


def test_boxes_are_tight(scenes):
    for scene in scenes:
        instances = scene.annotation.instances
        for instance_id, box in zip(scene.annotation.instance_ids(), scene.boxes):
            inside = instances[box.y1:box.y2, box.x1:box.x2] == instance_id
            assert inside.sum() == np.count_nonzero(instances == instance_id)
            assert inside[0].any() and inside[-1].any()
            assert inside[:, 0].any() and inside[:, -1].any()
            assert box.class_id == scene.annotation.classes[instance_id]


def test_crop_keeps_visible_instances(scenes):
    scene = scenes[0]
    crop = scene.crop(64, 128, 128, 256)
    assert crop.shape == (128, 256)
    np.testing.assert_array_equal(crop.image, scene.image[64:192, 128:384])
    assert set(crop.annotation.classes) == set(crop.annotation.instance_ids())
    with pytest.raises(ValueError):
        scene.crop(200, 0, 128, 64)


def test_scene_validation():
    with pytest.raises(ValueError):
        SyntheticScene(np.zeros((4, 4, 3)), AnnotationMap(np.zeros((4, 5))))
    with pytest.raises(ValueError):
        make_synthetic_dataset(0)
    with pytest.raises(ValueError):
        make_synthetic_dataset(1, num_classes=6)


def test_two_class_scenes():
    scene = make_scene(128, 256, num_classes=2, random_state=3)
    assert set(scene.annotation.classes.values()) <= {1}


def test_simulated_detections(scenes):
    scene = scenes[1]
    perfect = simulate_detections(scene, miss_rate=0.0, jitter=0.0, random_state=0)
    assert [b.as_tuple() for b in perfect] == [b.as_tuple() for b in scene.boxes]
    assert all(0.5 <= b.confidence <= 1.0 for b in perfect)
    none = simulate_detections(scene, miss_rate=1.0, false_positives=3, random_state=0)
    assert len(none) == 3
    assert all(b.confidence < 0.25 for b in none)
    with pytest.raises(ValueError):
        simulate_detections(scene, miss_rate=1.5)
