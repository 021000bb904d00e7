"""
File: synthetic.py
Description: desk-scale street-scene surrogate. Backgrounds mix smooth
gradients ("road", "sky") with noisy texture bands ("trees"); objects are
ellipses, rectangles and triangles, one shape and colour family per class.
"""

from __future__ import absolute_import

from typing import List, Sequence

from salientcodec.masks.criteria import AnnotationMap, DetectionBox
from salientcodec.utils.validation import check_random_state

from scipy.ndimage import gaussian_filter

import numpy as np

SCENE_SIZE = (256, 512)
NUM_CLASSES = 4
OBJECT_FRACTION = (0.05, 0.40)

# class id -> (shape, base colour)
_CLASS_STYLE = {1: ('ellipse', (0.85, 0.15, 0.10)),
                2: ('rectangle', (0.10, 0.30, 0.90)),
                3: ('triangle', (0.95, 0.85, 0.10))}


class SyntheticScene():
    """image (H x W x 3 in [0, 1]) with its instance annotation"""

    def __init__(self, image: np.ndarray, annotation: AnnotationMap):
        if image.shape[:2] != annotation.shape:
            raise ValueError(f'image {image.shape} and annotation {annotation.shape} disagree')
        self.image = image
        self.annotation = annotation

    @property
    def shape(self):
        return self.image.shape[:2]

    @property
    def boxes(self) -> List[DetectionBox]:
        return self.annotation.boxes()

    @property
    def labels(self) -> np.ndarray:
        return self.annotation.class_labels()

    def object_fraction(self) -> float:
        return self.annotation.object_fraction()

    def crop(self, top: int, left: int, height: int, width: int) -> 'SyntheticScene':
        if top < 0 or left < 0 or top + height > self.shape[0] or left + width > self.shape[1]:
            raise ValueError(f'crop ({top}, {left}, {height}, {width}) leaves the '
                             f'{self.shape[0]}x{self.shape[1]} scene')
        instances = self.annotation.instances[top:top + height, left:left + width]
        kept = {i: c for i, c in self.annotation.classes.items() if np.any(instances == i)}
        return SyntheticScene(self.image[top:top + height, left:left + width].copy(),
                              AnnotationMap(instances.copy(), kept))


def _background(height: int, width: int, random_state) -> np.ndarray:
    rows = np.linspace(0.0, 1.0, height)[:, None, None]
    sky = np.array(random_state.uniform(0.55, 0.9, size=3))
    road = np.array(random_state.uniform(0.2, 0.45, size=3))
    image = np.broadcast_to(sky * (1 - rows) + road * rows, (height, width, 3)).copy()

    # a band of busy texture
    top = random_state.randint(0, height // 2)
    bottom = min(height, top + random_state.randint(height // 6, height // 2))
    noise = gaussian_filter(random_state.normal(0.0, 1.0, size=(height, width)), sigma=1.2)
    noise = noise / (np.abs(noise).max() + 1e-12)
    green = np.array([0.15, 0.45, 0.15])
    band = green + 0.25 * noise[top:bottom, :, None]
    image[top:bottom] = band

    # faint large-scale variation everywhere else
    smooth = gaussian_filter(random_state.normal(0.0, 1.0, size=(height, width)), sigma=12.0)
    image += 0.3 * smooth[:, :, None]
    return image


def _shape_mask(shape: str, height: int, width: int, cy, cx, ry, rx) -> np.ndarray:
    yy, xx = np.mgrid[0:height, 0:width]
    if shape == 'ellipse':
        return ((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2 <= 1.0
    if shape == 'rectangle':
        return (np.abs(yy - cy) <= ry) & (np.abs(xx - cx) <= rx)
    # isosceles triangle, apex up
    rel = (yy - (cy - ry)) / (2.0 * ry)
    return (rel >= 0) & (rel <= 1) & (np.abs(xx - cx) <= rel * rx)


def make_scene(height: int = SCENE_SIZE[0], width: int = SCENE_SIZE[1],
               num_classes: int = NUM_CLASSES, object_fraction: Sequence[float] = OBJECT_FRACTION,
               random_state=None) -> SyntheticScene:
    random_state = check_random_state(random_state)
    low, high = object_fraction
    image = _background(height, width, random_state)
    instances = np.zeros((height, width), dtype=np.uint16)
    classes = {}
    target = random_state.uniform(low + 0.25 * (high - low), low + 0.65 * (high - low))
    side = min(height, width)
    next_id = 1
    for _ in range(400):
        if np.count_nonzero(instances) / instances.size >= target:
            break
        class_id = int(random_state.randint(1, num_classes))
        shape, colour = _CLASS_STYLE[1 + (class_id - 1) % len(_CLASS_STYLE)]
        ry = random_state.uniform(0.04, 0.17) * side
        rx = ry * random_state.uniform(0.7, 1.6)
        cy = random_state.uniform(ry, height - ry)
        cx = random_state.uniform(rx, width - rx)
        region = _shape_mask(shape, height, width, cy, cx, ry, rx)
        candidate = np.where(region, next_id, instances)
        if np.count_nonzero(candidate) / instances.size > high:
            continue
        instances = candidate.astype(np.uint16)
        tint = np.asarray(colour) + random_state.normal(0.0, 0.05, size=3)
        shading = 0.04 * random_state.normal(0.0, 1.0, size=(height, width))
        image[region] = tint + shading[region][:, None]
        classes[next_id] = class_id
        next_id += 1

    annotation = AnnotationMap(instances, classes)
    # drop classes of instances that were painted over completely
    annotation.classes = {i: c for i, c in classes.items() if i in annotation.instance_ids()}
    return SyntheticScene(np.clip(image, 0.0, 1.0), annotation)


def make_synthetic_dataset(n_scenes: int, seed=None, height: int = SCENE_SIZE[0],
                           width: int = SCENE_SIZE[1], num_classes: int = NUM_CLASSES) -> List[SyntheticScene]:
    """make_synthetic_dataset.
        Reproducible list of scenes; the same seed gives a bit-identical dataset.

    Args:
        n_scenes: number of scenes, at least 1
        seed: None, int or RandomState
        height: scene height in pixels
        width: scene width in pixels
        num_classes: K, background included
    """
    if n_scenes < 1:
        raise ValueError(f'n_scenes must be at least 1, got {n_scenes}')
    if not 2 <= num_classes <= len(_CLASS_STYLE) + 1:
        raise ValueError(f'num_classes must lie in [2, {len(_CLASS_STYLE) + 1}], got {num_classes}')
    random_state = check_random_state(seed)
    return [make_scene(height, width, num_classes, random_state=random_state)
            for _ in range(n_scenes)]


def simulate_detections(scene: SyntheticScene, miss_rate: float = 0.1, jitter: float = 4.0,
                        false_positives: int = 0, random_state=None) -> List[DetectionBox]:
    """
        Imperfect detector: each object is missed with probability miss_rate,
        kept boxes are jittered by N(0, jitter) pixels per side and get a
        confidence in [0.5, 1]. False positives carry a confidence below 0.25.
    """
    if not 0.0 <= miss_rate <= 1.0:
        raise ValueError(f'miss_rate must lie in [0, 1], got {miss_rate}')
    random_state = check_random_state(random_state)
    height, width = scene.shape
    detections = []
    for box in scene.boxes:
        if random_state.random_sample() < miss_rate:
            continue
        x1, y1, x2, y2 = np.asarray(box.as_tuple()) + np.round(
            random_state.normal(0.0, jitter, size=4)).astype(int)
        if x1 >= x2 or y1 >= y2:
            continue
        moved = DetectionBox(box.class_id, random_state.uniform(0.5, 1.0), x1, y1, x2, y2)
        moved = moved.clamp(height, width)
        if moved is not None:
            detections.append(moved)
    for _ in range(false_positives):
        h, w = random_state.randint(8, max(9, height // 4)), random_state.randint(8, max(9, width // 4))
        y1, x1 = random_state.randint(0, height - h + 1), random_state.randint(0, width - w + 1)
        detections.append(DetectionBox(random_state.randint(1, NUM_CLASSES),
                                       random_state.uniform(0.0, 0.24), x1, y1, x1 + w, y1 + h))
    return detections
