"""
File: experiments.py
Description: held-out evaluation of a trained codec on synthetic scenes.
Every scene is padded, coded to a real bitstream and reconstructed; the
frozen proxy network then scores the reconstruction.
"""

from __future__ import absolute_import

from collections import OrderedDict
from typing import Callable, List, Sequence

from salientcodec.datasets.synthetic import SyntheticScene, simulate_detections
from salientcodec.entropy.bitstream import encode_bitstream
from salientcodec.masks.criteria import (DEFAULT_VARIANCE_THRESHOLDS, detection_mask, gt_mask,
                                         uniform_mask, variance_mask)
from salientcodec.masks.saliency_mask import CELL_SIZE, SaliencyMask
from salientcodec.models.codec import HierarchicalCodec, image_to_tensor
from salientcodec.models.proxy import ProxySegNet
from salientcodec.tools.rate_accuracy import (ClassAPTable, RateAccuracyCurve, bits_per_pixel,
                                              weighted_ap)
from salientcodec.utils.validation import check_random_state

import numpy as np


def variance_mask_fn(thresholds=DEFAULT_VARIANCE_THRESHOLDS) -> Callable:
    return lambda scene: variance_mask(scene.image, thresholds)


def gt_mask_fn() -> Callable:
    return lambda scene: gt_mask(scene.annotation, scene.shape)


def uniform_mask_fn(level: int = 1) -> Callable:
    return lambda scene: uniform_mask(scene.shape, level)


def detection_mask_fn(miss_rate: float = 0.1, jitter: float = 4.0, false_positives: int = 2,
                      random_state=None) -> Callable:
    """masks from the simulated detector; one generator shared across scenes"""
    random_state = check_random_state(random_state)

    def mask(scene):
        boxes = simulate_detections(scene, miss_rate, jitter, false_positives, random_state)
        return detection_mask(boxes, scene.shape)
    return mask


MASK_FUNCTIONS = OrderedDict([('variance', variance_mask_fn), ('gt', gt_mask_fn),
                              ('detections', detection_mask_fn), ('uniform', uniform_mask_fn)])


def cell_sums(values: np.ndarray, cell_size: int = CELL_SIZE) -> np.ndarray:
    """sum of an H x W map over every (possibly cropped) cell"""
    height, width = values.shape
    rows, cols = -(-height // cell_size), -(-width // cell_size)
    padded = np.zeros((rows * cell_size, cols * cell_size))
    padded[:height, :width] = values
    return padded.reshape(rows, cell_size, cols, cell_size).sum(axis=(1, 3))


class SceneEvaluation():
    """per-scene numbers gathered by evaluate_scenes"""

    def __init__(self, bpp: float, estimated_bpp: float, mask: SaliencyMask,
                 cell_bits: np.ndarray, cell_mse: np.ndarray, cell_task_loss: np.ndarray,
                 salient: np.ndarray):
        self.bpp = bpp
        self.estimated_bpp = estimated_bpp
        self.mask = mask
        self.cell_bits = cell_bits
        self.cell_mse = cell_mse
        self.cell_task_loss = cell_task_loss
        # cells holding an annotated object, whatever mask was used for coding
        self.salient = salient


class EvaluationReport():
    def __init__(self, scenes: List[SceneEvaluation], iou: np.ndarray, instances: np.ndarray):
        self.scenes = scenes
        self.iou = iou
        self.instances = instances

    def _cells(self, values, level):
        picked = [v[s.mask.cells(level)] for s, v in zip(self.scenes, values)]
        picked = np.concatenate(picked) if picked else np.zeros(0)
        return float(picked.mean()) if picked.size else float('nan')

    @property
    def mean_bpp(self) -> float:
        return float(np.mean([s.bpp for s in self.scenes]))

    def mean_cell_bits(self, level: int) -> float:
        """average estimated bits of a cell assigned to level; nan when no cell is"""
        return self._cells([s.cell_bits for s in self.scenes], level)

    def mean_cell_mse(self, level: int) -> float:
        return self._cells([s.cell_mse for s in self.scenes], level)

    @property
    def salient_task_loss(self) -> float:
        """proxy cross-entropy averaged over the cells that hold an annotated object"""
        picked = np.concatenate([s.cell_task_loss[s.salient] for s in self.scenes])
        return float(picked.mean()) if picked.size else float('nan')

    def class_table(self) -> ClassAPTable:
        """object classes with at least one instance, IoU standing in for AP"""
        keep = [k for k in range(1, len(self.iou)) if self.instances[k] > 0]
        if not keep:
            raise ValueError('the evaluated scenes contain no annotated object')
        return ClassAPTable(self.iou[keep], self.instances[keep], keep)

    @property
    def wap(self) -> float:
        return weighted_ap(self.class_table())

    def point(self):
        return self.mean_bpp, self.wap

    def summary(self) -> dict:
        return OrderedDict([('bpp', self.mean_bpp), ('wap', self.wap),
                            ('bits_level1_cells', self.mean_cell_bits(1)),
                            ('bits_level3_cells', self.mean_cell_bits(3)),
                            ('mse_level1_cells', self.mean_cell_mse(1)),
                            ('mse_level3_cells', self.mean_cell_mse(3)),
                            ('task_loss_salient_cells', self.salient_task_loss)])


def evaluate_scenes(codec: HierarchicalCodec, scenes: Sequence[SyntheticScene],
                    mask_fn: Callable[[SyntheticScene], SaliencyMask],
                    proxy: ProxySegNet, lambda_id: int = 0) -> EvaluationReport:
    """evaluate_scenes.
        Code every scene with its mask and collect coded bpp, estimated bits
        per cell, per-cell MSE and the proxy's per-class IoU accumulated over
        all scenes.

    Args:
        codec: trained HierarchicalCodec
        scenes: held-out scenes
        mask_fn: scene -> SaliencyMask
        proxy: frozen ProxySegNet scoring the reconstructions
        lambda_id: rate point recorded in the bitstream headers
    """
    k = proxy.num_classes
    intersections, unions = np.zeros(k), np.zeros(k)
    instances = np.zeros(k, dtype=np.int64)
    results = []
    for scene in scenes:
        m = mask_fn(scene)
        height, width = scene.shape
        recon, latents, rate = codec.reconstruct(scene.image, m)
        stream = encode_bitstream(latents, m, codec, lambda_id)
        x_hat = recon.image()

        pixels = cell_sums(np.ones((height, width)))
        cell_mse = cell_sums(((x_hat - scene.image) ** 2).mean(axis=2)) / pixels

        labels = scene.labels
        padded = image_to_tensor(_pad4(x_hat))
        pred = proxy.predict(padded)[0][:height, :width]
        padded_labels = np.pad(labels, ((0, -height % 4), (0, -width % 4)), mode='edge')
        pixel_loss = proxy.pixel_loss(padded, padded_labels[None])[0][:height, :width]
        cell_task_loss = cell_sums(pixel_loss) / pixels

        rows, cols = m.shape
        results.append(SceneEvaluation(bits_per_pixel(stream, height, width),
                                       rate.bits / (height * width), m,
                                       rate.cell_bits[0][:rows, :cols], cell_mse, cell_task_loss,
                                       gt_mask(scene.annotation, scene.shape).cells(1)))

        for c in range(k):
            p, g = pred == c, labels == c
            intersections[c] += np.count_nonzero(p & g)
            unions[c] += np.count_nonzero(p | g)
        for c in scene.annotation.classes.values():
            instances[c] += 1
    iou = np.where(unions > 0, 100.0 * intersections / np.maximum(unions, 1), 100.0)
    return EvaluationReport(results, iou, instances)


def _pad4(image: np.ndarray) -> np.ndarray:
    height, width = image.shape[:2]
    return np.pad(image, ((0, -height % 4), (0, -width % 4), (0, 0)), mode='edge')


def rate_accuracy_curve(label: str, reports: Sequence[EvaluationReport]) -> RateAccuracyCurve:
    """one point per report, typically one per lambda"""
    return RateAccuracyCurve(label, [r.point() for r in reports], metric='wAP')
