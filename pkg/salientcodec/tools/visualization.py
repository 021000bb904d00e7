"""
File: visualization.py
Description: rate-accuracy curve files (CSV + SVG chart) and training history plots
"""

from __future__ import absolute_import

from collections import OrderedDict
from typing import Dict, List, Sequence, Union

from salientcodec.callbacks import History
from salientcodec.tools.rate_accuracy import RateAccuracyCurve
from salientcodec.utils.errors import InputError
from salientcodec.utils.fileio import atomic_write, write_text

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt

import io
import os
import csv
import itertools

CURVE_COLUMNS = ('codec', 'label', 'bpp', 'accuracy')


def curves_to_csv(curves: Sequence[RateAccuracyCurve]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(CURVE_COLUMNS)
    for curve in curves:
        for rate, accuracy in curve.points:
            writer.writerow([curve.label, curve.metric, repr(rate), repr(accuracy)])
    return buffer.getvalue()


def read_curves_csv(path) -> List[RateAccuracyCurve]:
    """curves in order of first appearance"""
    points, metrics = OrderedDict(), {}
    try:
        with open(path, 'r', newline='') as f:
            reader = csv.DictReader(f)
            if tuple(reader.fieldnames or ()) != CURVE_COLUMNS:
                raise InputError(f'{path}: expected columns {",".join(CURVE_COLUMNS)}')
            for row in reader:
                try:
                    points.setdefault(row['codec'], []).append(
                        (float(row['bpp']), float(row['accuracy'])))
                except ValueError as e:
                    raise InputError(f'{path}: bad curve row {row} ({e})')
                metrics[row['codec']] = row['label']
    except FileNotFoundError:
        raise InputError(f'curve file {path} does not exist')
    return [RateAccuracyCurve(codec, pts, metrics[codec]) for codec, pts in points.items()]


def plot_curves(curves: Sequence[RateAccuracyCurve], title: str = 'rate-accuracy',
                marker=('o', 's', '^', 'D', 'v', '*')):
    """figure with one series per codec; every line carries gid series-<codec>"""
    fig, ax = plt.subplots(figsize=(6, 4))
    iter_marker = itertools.cycle(marker)
    for curve in curves:
        ax.plot(curve.rates, curve.accuracies, marker=next(iter_marker), label=curve.label,
                gid=f'series-{curve.label}')
    metric = curves[0].metric if curves else 'accuracy'
    ax.set_xlabel('bits per pixel')
    ax.set_ylabel(metric)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    if curves:
        ax.legend(frameon=False)
    fig.tight_layout()
    return fig


def emit_curves(curves: Sequence[RateAccuracyCurve], out_path, title: str = 'rate-accuracy'):
    """emit_curves.
        Write <out_path>.csv and <out_path>.svg. Both files appear atomically.

    Args:
        curves: rate-accuracy curves
        out_path: output path without extension (an extension is stripped)
        title: chart title
    """
    root = os.path.splitext(str(out_path))[0]
    csv_path, svg_path = root + '.csv', root + '.svg'
    write_text(csv_path, curves_to_csv(curves))

    fig = plot_curves(curves, title)
    # fixed ids and no timestamp so identical curves give identical files
    with plt.rc_context({'svg.hashsalt': 'salientcodec', 'svg.fonttype': 'none'}):
        with atomic_write(svg_path, 'wb') as f:
            fig.savefig(f, format='svg', metadata={'Date': None})
    plt.close(fig)
    return csv_path, svg_path


def plot_training_history(history_dict: Dict[str, Union[History, List[dict], List[float]]] = None,
                          filepath='./history.png',
                          title='history',
                          key='loss_total',
                          save=False,
                          show=True,
                          **kwargs):
    history_dict = dict(history_dict or {})
    history_dict.update(kwargs)
    for name, history in history_dict.items():
        if isinstance(history, History):
            history = history.history
        if history and isinstance(history[0], dict):
            if not all(key in logs for logs in history):
                raise ValueError(f'plot_training_history needs {key!r} in every epoch log')
            history = [logs[key] for logs in history]
        history_dict[name] = history
    plt.figure()
    legends = []
    for name, history in history_dict.items():
        legends.append(name)
        plt.plot(range(len(history)), history)

    plt.xlabel('epoch')
    plt.ylabel(key)
    plt.title(title)
    plt.legend(legends)
    if save:
        plt.savefig(filepath)

    if show:
        plt.show()

    plt.close('all')
