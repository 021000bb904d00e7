from salientcodec.masks.criteria import (AnnotationMap, DetectionBox, block_luma_variance,
                                         detection_mask, gt_mask, uniform_mask, variance_mask)
from salientcodec.utils.errors import DimensionError

import pytest
import numpy as np


def _cells(m, level):
    return {tuple(rc) for rc in np.argwhere(m.grid == level)}


def test_constant_image_is_all_level_three():
    m = variance_mask(np.full((128, 256, 3), 0.3))
    assert m.count(3) == m.grid.size


def test_checkerboard_cell_is_level_one():
    image = np.zeros((64, 64, 3))
    yy, xx = np.mgrid[:64, :64]
    image[(yy + xx) % 2 == 0] = 1.0
    assert block_luma_variance(image)[0, 0] == pytest.approx(0.25)
    assert variance_mask(image).grid[0, 0] == 1


def test_two_region_image(textured_image):
    m = variance_mask(textured_image)
    assert m.shape == (2, 3)
    assert np.all(m.grid[:, 0] == 3)
    assert np.all(m.grid[:, 2] == 1)


def test_variance_mask_ignores_brightness_offset(textured_image):
    dimmed = textured_image * 0.8
    assert variance_mask(dimmed + 0.1) == variance_mask(dimmed)


def test_variance_thresholds_are_ordered(textured_image):
    with pytest.raises(ValueError):
        variance_mask(textured_image, (0.1, 0.01))


def test_detection_mask_without_boxes():
    m = detection_mask([], (512, 1024))
    assert m.count(3) == 8 * 16


def test_detection_mask_exact_cell():
    m = detection_mask([DetectionBox(1, 0.9, 0, 0, 64, 64)], (512, 1024))
    assert _cells(m, 1) == {(0, 0)}
    assert m.count(2) == 0


def test_detection_mask_any_overlap():
    m = detection_mask([DetectionBox(1, 0.9, 32, 32, 96, 96)], (512, 1024))
    assert _cells(m, 1) == {(0, 0), (0, 1), (1, 0), (1, 1)}


def test_detection_mask_confidence_and_clamping():
    boxes = [DetectionBox(1, 0.1, 0, 0, 64, 64), DetectionBox(2, 0.5, 1000, 480, 1200, 700)]
    m = detection_mask(boxes, (512, 1024))
    assert _cells(m, 1) == {(7, 15)}


def test_detection_mask_is_monotone(rng):
    boxes = []
    previous = detection_mask(boxes, (256, 512))
    for _ in range(6):
        x1, y1 = rng.randint(0, 480), rng.randint(0, 230)
        boxes.append(DetectionBox(1, 0.9, x1, y1, x1 + rng.randint(1, 60), y1 + rng.randint(1, 40)))
        current = detection_mask(boxes, (256, 512))
        assert _cells(previous, 1) <= _cells(current, 1)
        previous = current


def test_degenerate_boxes_are_rejected():
    with pytest.raises(ValueError):
        DetectionBox(1, 0.5, 10, 10, 10, 20)
    with pytest.raises(ValueError):
        DetectionBox(1, 1.5, 0, 0, 1, 1)


def test_gt_mask_cases():
    empty = np.zeros((256, 512), dtype=np.uint16)
    assert gt_mask(AnnotationMap(empty)).count(3) == 4 * 8
    single = empty.copy()
    single[100, 200] = 5
    assert _cells(gt_mask(AnnotationMap(single)), 1) == {(1, 3)}
    assert gt_mask(AnnotationMap(np.ones((256, 512)))).count(1) == 4 * 8


def test_gt_mask_size_mismatch():
    with pytest.raises(DimensionError):
        gt_mask(AnnotationMap(np.zeros((64, 64))), (128, 64))


def test_gt_mask_within_tight_box_mask(rng):
    instances = np.zeros((256, 512), dtype=np.uint16)
    instances[30:90, 100:140] = 1
    instances[150:160, 300:420] = 2
    instances[200:256, 0:10] = 3
    ann = AnnotationMap(instances, {1: 1, 2: 2, 3: 3})
    boxes = ann.boxes()
    assert [b.as_tuple() for b in boxes] == [(100, 30, 140, 90), (300, 150, 420, 160),
                                             (0, 200, 10, 256)]
    assert _cells(gt_mask(ann), 1) <= _cells(detection_mask(boxes, ann.shape), 1)


def test_annotation_labels_and_fraction():
    instances = np.zeros((4, 4), dtype=np.uint16)
    instances[0, :2] = 7
    ann = AnnotationMap(instances, {7: 2})
    assert ann.instance_ids() == [7]
    assert ann.class_labels()[0, 0] == 2
    assert ann.object_fraction() == 2 / 16


def test_uniform_mask():
    assert uniform_mask((128, 128), 1).count(1) == 4
