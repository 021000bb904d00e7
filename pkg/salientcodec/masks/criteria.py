"""
File: criteria.py
Description: saliency criteria, block variance for the human-viewing baseline,
detection boxes at inference and ground-truth annotations for training.
"""

from __future__ import absolute_import

from typing import List, Optional, Sequence, Tuple

from salientcodec.masks.saliency_mask import SaliencyMask, CELL_SIZE, grid_dims
from salientcodec.utils.errors import DimensionError
from salientcodec.utils.validation import check_image

import numpy as np

DEFAULT_VARIANCE_THRESHOLDS = (0.002, 0.02)
DEFAULT_CONFIDENCE_MIN = 0.25

_LUMA = np.array([0.299, 0.587, 0.114])


class DetectionBox():
    """pixel box, x1/y1 inclusive and x2/y2 exclusive"""

    def __init__(self, class_id: int, confidence: float, x1, y1, x2, y2):
        if not 0.0 <= confidence <= 1.0:
            raise ValueError(f'confidence must lie in [0, 1], got {confidence}')
        if not (x1 < x2 and y1 < y2):
            raise ValueError(f'degenerate box ({x1}, {y1})-({x2}, {y2})')
        self.class_id = int(class_id)
        self.confidence = float(confidence)
        self.x1, self.y1, self.x2, self.y2 = int(x1), int(y1), int(x2), int(y2)

    def clamp(self, height: int, width: int) -> Optional['DetectionBox']:
        """clip to the image; None when nothing of the box is left"""
        x1, y1 = max(self.x1, 0), max(self.y1, 0)
        x2, y2 = min(self.x2, width), min(self.y2, height)
        if x1 >= x2 or y1 >= y2:
            return None
        return DetectionBox(self.class_id, self.confidence, x1, y1, x2, y2)

    @property
    def area(self) -> int:
        return (self.x2 - self.x1) * (self.y2 - self.y1)

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return self.x1, self.y1, self.x2, self.y2

    def __eq__(self, other):
        return isinstance(other, DetectionBox) and vars(self) == vars(other)

    def __repr__(self):
        return (f'DetectionBox(class={self.class_id}, conf={self.confidence:.2f}, '
                f'box={self.as_tuple()})')


class AnnotationMap():
    def __init__(self, instances, classes: dict = None):
        instances = np.asarray(instances)
        if instances.ndim != 2:
            raise DimensionError(f'annotation raster has to be H x W, got shape {instances.shape}')
        self.instances = instances.astype(np.uint16)
        # instance id -> class id
        self.classes = dict(classes or {})

    @property
    def shape(self) -> Tuple[int, int]:
        return self.instances.shape

    def instance_ids(self) -> List[int]:
        ids = np.unique(self.instances)
        return [int(i) for i in ids if i != 0]

    def boxes(self) -> List[DetectionBox]:
        """tight boxes around every instance"""
        boxes = []
        for i in self.instance_ids():
            ys, xs = np.nonzero(self.instances == i)
            boxes.append(DetectionBox(self.classes.get(i, 1), 1.0,
                                      xs.min(), ys.min(), xs.max() + 1, ys.max() + 1))
        return boxes

    def class_labels(self) -> np.ndarray:
        labels = np.zeros(self.shape, dtype=np.int64)
        for i in self.instance_ids():
            labels[self.instances == i] = self.classes.get(i, 1)
        return labels

    def object_fraction(self) -> float:
        return float(np.count_nonzero(self.instances)) / self.instances.size


def block_luma_variance(x, cell_size: int = CELL_SIZE) -> np.ndarray:
    x = check_image(x)
    luma = x @ _LUMA
    height, width = luma.shape
    rows, cols = grid_dims(height, width, cell_size)
    variance = np.zeros((rows, cols))
    for r in range(rows):
        for c in range(cols):
            block = luma[r * cell_size:(r + 1) * cell_size, c * cell_size:(c + 1) * cell_size]
            variance[r, c] = block.var()
    return variance


def variance_mask(x, thresholds: Sequence[float] = DEFAULT_VARIANCE_THRESHOLDS) -> SaliencyMask:
    """level 1 for busy cells, level 3 for flat ones, level 2 in between"""
    t_low, t_high = thresholds
    if not t_low < t_high:
        raise ValueError(f'thresholds must satisfy t_low < t_high, got {thresholds}')
    variance = block_luma_variance(x)
    grid = np.full(variance.shape, 2, dtype=np.uint8)
    grid[variance < t_low] = 3
    grid[variance >= t_high] = 1
    height, width = np.shape(x)[:2]
    return SaliencyMask(grid, (height, width))


def detection_mask(boxes: Sequence[DetectionBox], image_size: Tuple[int, int],
                   confidence_min: float = DEFAULT_CONFIDENCE_MIN) -> SaliencyMask:
    """
        Any cell a confident box overlaps goes to level 1, everything else to
        level 3. Level 2 is left unused.
    """
    height, width = image_size
    grid = np.full(grid_dims(height, width), 3, dtype=np.uint8)
    for box in boxes:
        if box.confidence < confidence_min:
            continue
        box = box.clamp(height, width)
        if box is None:
            continue
        grid[box.y1 // CELL_SIZE:(box.y2 - 1) // CELL_SIZE + 1,
             box.x1 // CELL_SIZE:(box.x2 - 1) // CELL_SIZE + 1] = 1
    return SaliencyMask(grid, (height, width))


def gt_mask(ann, image_size: Tuple[int, int] = None) -> SaliencyMask:
    """cells holding at least one annotated pixel go to level 1, the rest to level 3"""
    instances = ann.instances if isinstance(ann, AnnotationMap) else np.asarray(ann)
    if instances.ndim != 2:
        raise DimensionError(f'annotation raster has to be H x W, got shape {instances.shape}')
    height, width = instances.shape
    if image_size is not None and tuple(image_size) != (height, width):
        raise DimensionError(
            f'annotation of {height}x{width} does not match image of {image_size[0]}x{image_size[1]}')
    rows, cols = grid_dims(height, width)
    padded = np.zeros((rows * CELL_SIZE, cols * CELL_SIZE), dtype=bool)
    padded[:height, :width] = instances != 0
    occupied = padded.reshape(rows, CELL_SIZE, cols, CELL_SIZE).any(axis=(1, 3))
    grid = np.where(occupied, 1, 3).astype(np.uint8)
    return SaliencyMask(grid, (height, width))


def uniform_mask(image_size: Tuple[int, int], level: int = 1) -> SaliencyMask:
    """every cell on one level; level 1 gives the single-latent-space baseline"""
    return SaliencyMask.full(image_size, level)
