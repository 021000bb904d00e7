"""
File: io.py
Description: detection JSON lines, 16-bit annotation rasters and ASCII mask dumps
"""

from __future__ import absolute_import

from typing import List

from PIL import Image

from salientcodec.masks.criteria import AnnotationMap, DetectionBox
from salientcodec.masks.saliency_mask import SaliencyMask
from salientcodec.utils.errors import InputError
from salientcodec.utils.fileio import atomic_write, write_text

import json
import numpy as np


def load_detections(path, image_id=None) -> List[DetectionBox]:
    """one JSON object per line: image_id, class, confidence, x1, y1, x2, y2"""
    boxes = []
    try:
        with open(path) as f:
            for lineno, line in enumerate(f, 1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                    if image_id is not None and str(record.get('image_id')) != str(image_id):
                        continue
                    boxes.append(DetectionBox(record['class'], record['confidence'],
                                              record['x1'], record['y1'],
                                              record['x2'], record['y2']))
                except (ValueError, KeyError, TypeError) as e:
                    raise InputError(f'{path}:{lineno}: bad detection record ({e})')
    except FileNotFoundError:
        raise InputError(f'{path}: no such detection file')
    return boxes


def save_detections(path, boxes: List[DetectionBox], image_id):
    lines = []
    for box in boxes:
        lines.append(json.dumps({'image_id': image_id, 'class': box.class_id,
                                 'confidence': box.confidence,
                                 'x1': box.x1, 'y1': box.y1, 'x2': box.x2, 'y2': box.y2},
                                sort_keys=True))
    write_text(path, '\n'.join(lines) + ('\n' if lines else ''))


def load_annotations(path) -> AnnotationMap:
    try:
        with Image.open(path) as img:
            instances = np.asarray(img).astype(np.uint16)
    except FileNotFoundError:
        raise InputError(f'{path}: no such annotation file')
    except (OSError, SyntaxError) as e:
        raise InputError(f'{path}: unreadable annotation raster ({e})')
    if instances.ndim != 2:
        raise InputError(f'{path}: annotation raster has to be single channel')
    return AnnotationMap(instances)


def save_annotations(path, ann: AnnotationMap):
    with atomic_write(path, 'wb') as f:
        Image.fromarray(ann.instances.astype(np.uint16)).save(f, format='PNG')


def write_mask_ascii(path, m: SaliencyMask):
    write_text(path, m.to_ascii())


def read_mask_ascii(path, image_size=None) -> SaliencyMask:
    try:
        with open(path) as f:
            text = f.read()
    except FileNotFoundError:
        raise InputError(f'{path}: no such mask file')
    try:
        return SaliencyMask.from_ascii(text, image_size)
    except ValueError as e:
        raise InputError(f'{path}: {e}')
