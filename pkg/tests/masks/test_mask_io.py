from salientcodec.masks.criteria import AnnotationMap, DetectionBox
from salientcodec.masks.io import (load_annotations, load_detections, read_mask_ascii,
                                   save_annotations, save_detections, write_mask_ascii)
from salientcodec.masks.saliency_mask import SaliencyMask
from salientcodec.utils.errors import InputError

import pytest
import numpy as np


def test_detections_round_trip_and_filtering(tmp_path):
    path = tmp_path / 'det.jsonl'
    boxes = [DetectionBox(1, 0.9, 0, 0, 10, 10), DetectionBox(2, 0.3, 5, 6, 50, 60)]
    save_detections(path, boxes, 'frame1')
    with open(path, 'a') as f:
        f.write('{"image_id": "frame2", "class": 1, "confidence": 1.0, '
                '"x1": 0, "y1": 0, "x2": 1, "y2": 1}\n')
    assert load_detections(path, 'frame1') == boxes
    assert len(load_detections(path)) == 3


def test_bad_detection_record(tmp_path):
    path = tmp_path / 'det.jsonl'
    path.write_text('{"image_id": 1, "class": 1}\n')
    with pytest.raises(InputError) as info:
        load_detections(path)
    assert ':1:' in str(info.value)


def test_missing_files_are_input_errors(tmp_path):
    with pytest.raises(InputError):
        load_detections(tmp_path / 'none.jsonl')
    with pytest.raises(InputError):
        load_annotations(tmp_path / 'none.png')
    with pytest.raises(InputError):
        read_mask_ascii(tmp_path / 'none.txt')


def test_annotation_raster_keeps_sixteen_bit_ids(tmp_path):
    instances = np.zeros((64, 96), dtype=np.uint16)
    instances[3:9, 4:20] = 1000
    path = tmp_path / 'ann.png'
    save_annotations(path, AnnotationMap(instances))
    np.testing.assert_array_equal(load_annotations(path).instances, instances)


def test_mask_dump_round_trip(tmp_path):
    m = SaliencyMask([[1, 3, 3], [2, 1, 3]], image_size=(128, 150))
    path = tmp_path / 'mask.txt'
    write_mask_ascii(path, m)
    assert read_mask_ascii(path, (128, 150)) == m
    with pytest.raises(InputError):
        read_mask_ascii(path, (64, 64))
