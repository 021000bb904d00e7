"""
File: rate_accuracy.py
Description: rate-accuracy bookkeeping. Bits per pixel from coded streams,
class-weighted average precision and the Bjontegaard deltas between two
rate-accuracy curves.

The Bjontegaard rate delta fits log10(rate) as a function of accuracy for
both curves, integrates the difference over the accuracy range both curves
cover, and turns the mean log-rate difference into a percentage. Negative
values mean the test curve needs fewer bits for the same accuracy.
"""

from __future__ import absolute_import

from collections import OrderedDict
from typing import List, Sequence, Tuple

from salientcodec.utils.errors import InputError, NoOverlapError
from salientcodec.utils.fileio import write_text
from salientcodec.utils.typing import RatePoints

from scipy import integrate, interpolate

import json
import warnings
import numpy as np

BD_METHODS = ('polynomial', 'pchip')
MIN_CURVE_POINTS = 4
PCHIP_SAMPLES = 1000


def bits_per_pixel(b, height: int, width: int) -> float:
    """8 * bytes / (H * W) of the original image; b is a Bitstream, bytes or a byte count"""
    if height <= 0 or width <= 0:
        raise ValueError(f'image size must be positive, got {height}x{width}')
    n_bytes = b if isinstance(b, (int, np.integer)) else len(b)
    return 8.0 * n_bytes / (height * width)


class ClassAPTable():
    """per-class AP in percent with positive per-class weights (instance counts)"""

    def __init__(self, aps: Sequence[float], weights: Sequence[float], classes: Sequence = None):
        aps = np.asarray(aps, dtype=np.float64)
        weights = np.asarray(weights, dtype=np.float64)
        if aps.ndim != 1 or aps.shape != weights.shape:
            raise ValueError(f'aps and weights need equal 1-d shapes, got {aps.shape} and {weights.shape}')
        if np.any((aps < 0) | (aps > 100)):
            raise ValueError('AP values must lie in [0, 100]')
        if np.any(weights <= 0):
            raise ValueError('class weights must be positive')
        self.aps = aps
        self.weights = weights
        self.classes = list(classes) if classes is not None else list(range(len(aps)))

    def __len__(self):
        return len(self.aps)

    @classmethod
    def load(cls, path) -> 'ClassAPTable':
        """line-delimited JSON, one {"class", "ap", "weight"} record per line"""
        classes, aps, weights = [], [], []
        try:
            with open(path, 'r') as f:
                for lineno, line in enumerate(f, 1):
                    if not line.strip():
                        continue
                    try:
                        record = json.loads(line)
                        classes.append(record['class'])
                        aps.append(float(record['ap']))
                        weights.append(float(record['weight']))
                    except (ValueError, KeyError, TypeError) as e:
                        raise InputError(f'{path}:{lineno}: bad class AP record ({e})')
        except FileNotFoundError:
            raise InputError(f'class AP table {path} does not exist')
        return cls(aps, weights, classes)

    def save(self, path):
        lines = [json.dumps({'class': c, 'ap': float(a), 'weight': float(w)})
                 for c, a, w in zip(self.classes, self.aps, self.weights)]
        write_text(path, '\n'.join(lines) + '\n')


def weighted_ap(t: ClassAPTable) -> float:
    """sum(w_i * AP_i) / sum(w_i)"""
    if len(t) == 0:
        raise ValueError('weighted AP of an empty table')
    return float(np.dot(t.weights, t.aps) / t.weights.sum())


class RateAccuracyCurve():
    def __init__(self, label: str, points: RatePoints, metric: str = 'wAP',
                 dataset: str = ''):
        points = [(float(r), float(a)) for r, a in points]
        if any(r <= 0 for r, _ in points):
            raise ValueError(f'curve {label!r}: rates must be positive')
        if any(not 0.0 <= a <= 100.0 for _, a in points):
            raise ValueError(f'curve {label!r}: accuracies must lie in [0, 100]')
        points.sort()
        rates = [r for r, _ in points]
        if any(b <= a for a, b in zip(rates, rates[1:])):
            raise ValueError(f'curve {label!r}: two points share a rate')
        self.label = label
        self.points = points
        self.metric = metric
        self.dataset = dataset

    @property
    def rates(self) -> np.ndarray:
        return np.array([r for r, _ in self.points])

    @property
    def accuracies(self) -> np.ndarray:
        return np.array([a for _, a in self.points])

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        return (isinstance(other, RateAccuracyCurve) and self.label == other.label
                and self.points == other.points)

    def __repr__(self):
        return f'RateAccuracyCurve({self.label!r}, {len(self.points)} points)'

    def scaled(self, factor: float, label: str = None) -> 'RateAccuracyCurve':
        """same accuracies at factor times the rate"""
        return RateAccuracyCurve(label or self.label, [(r * factor, a) for r, a in self.points],
                                 self.metric, self.dataset)


class BDResult():
    def __init__(self, value: float, interval: Tuple[float, float], method: str,
                 diagnostics: dict = None):
        self.value = value
        self.interval = interval
        self.method = method
        self.diagnostics = diagnostics or OrderedDict()

    def __float__(self):
        return float(self.value)

    def __repr__(self):
        return (f'BDResult({self.value:+.2f}%, interval=[{self.interval[0]:.3f}, '
                f'{self.interval[1]:.3f}], method={self.method})')


def _check_curve(curve: RateAccuracyCurve):
    if len(curve) < MIN_CURVE_POINTS:
        raise ValueError(f'curve {curve.label!r} has {len(curve)} points, '
                         f'the Bjontegaard fit needs {MIN_CURVE_POINTS}')
    acc = curve.accuracies
    if np.any(np.diff(acc) <= 0):
        warnings.warn(f'curve {curve.label!r} is not monotone in accuracy; '
                      f'fitting on its points sorted by accuracy', RuntimeWarning)
    order = np.argsort(acc, kind='stable')
    return acc[order], np.log10(curve.rates[order])


def _overlap(a: np.ndarray, b: np.ndarray, what: str) -> Tuple[float, float]:
    low, high = max(a.min(), b.min()), min(a.max(), b.max())
    if not low < high:
        raise NoOverlapError(f'the curves share no {what} range '
                             f'([{a.min()}, {a.max()}] vs [{b.min()}, {b.max()}])')
    return float(low), float(high)


def _integral(x: np.ndarray, y: np.ndarray, low: float, high: float, method: str):
    """integral of the fitted y(x) over [low, high] and the fit residual"""
    if method == 'polynomial':
        poly = np.polyfit(x, y, 3)
        antiderivative = np.polyint(poly)
        residual = float(np.max(np.abs(np.polyval(poly, x) - y)))
        return np.polyval(antiderivative, high) - np.polyval(antiderivative, low), residual
    if np.any(np.diff(x) <= 0):
        raise ValueError('the piecewise fit needs distinct values along the fitted axis')
    samples, step = np.linspace(low, high, num=PCHIP_SAMPLES, retstep=True)
    values = interpolate.pchip_interpolate(x, y, samples)
    return float(integrate.trapezoid(values, dx=step)), 0.0


def bd_rate(anchor: RateAccuracyCurve, test: RateAccuracyCurve,
            method: str = 'polynomial') -> BDResult:
    """bd_rate.
        Average rate difference of test against anchor at equal accuracy, in
        percent.

    Args:
        anchor: reference curve, at least four points
        test: compared curve, at least four points
        method: 'polynomial' (cubic fit) or 'pchip' (piecewise cubic Hermite)
    """
    if method not in BD_METHODS:
        raise ValueError(f'method must be one of {BD_METHODS}, got {method!r}')
    acc_a, log_a = _check_curve(anchor)
    acc_t, log_t = _check_curve(test)
    low, high = _overlap(acc_a, acc_t, 'accuracy')
    int_a, res_a = _integral(acc_a, log_a, low, high, method)
    int_t, res_t = _integral(acc_t, log_t, low, high, method)
    avg_diff = (int_t - int_a) / (high - low)
    value = float((10.0 ** avg_diff - 1.0) * 100.0)
    diagnostics = OrderedDict([('mean_log10_rate_diff', float(avg_diff)),
                               ('anchor_fit_residual', res_a),
                               ('test_fit_residual', res_t)])
    return BDResult(value, (low, high), method, diagnostics)


def bd_accuracy(anchor: RateAccuracyCurve, test: RateAccuracyCurve,
                method: str = 'polynomial') -> BDResult:
    """average accuracy difference (test - anchor) at equal rate, in accuracy points"""
    if method not in BD_METHODS:
        raise ValueError(f'method must be one of {BD_METHODS}, got {method!r}')
    for curve in (anchor, test):
        if len(curve) < MIN_CURVE_POINTS:
            raise ValueError(f'curve {curve.label!r} has {len(curve)} points, '
                             f'the Bjontegaard fit needs {MIN_CURVE_POINTS}')
    log_a, acc_a = np.log10(anchor.rates), anchor.accuracies
    log_t, acc_t = np.log10(test.rates), test.accuracies
    low, high = _overlap(log_a, log_t, 'rate')
    int_a, res_a = _integral(log_a, acc_a, low, high, method)
    int_t, res_t = _integral(log_t, acc_t, low, high, method)
    value = float((int_t - int_a) / (high - low))
    diagnostics = OrderedDict([('anchor_fit_residual', res_a), ('test_fit_residual', res_t)])
    return BDResult(value, (float(10 ** low), float(10 ** high)), method, diagnostics)


def bd_table(anchor: RateAccuracyCurve, others: List[RateAccuracyCurve],
             method: str = 'polynomial') -> 'OrderedDict[str, object]':
    """label -> BDResult against anchor, or the NoOverlapError raised for that pair"""
    rows = OrderedDict()
    for curve in [anchor] + list(others):
        try:
            rows[curve.label] = bd_rate(anchor, curve, method)
        except NoOverlapError as e:
            rows[curve.label] = e
    return rows


"""
=======================================================================
Short name of the metrics
=======================================================================
"""
bpp = bits_per_pixel
wAP = weighted_ap
BDR = bd_rate
BD_ACC = bd_accuracy
