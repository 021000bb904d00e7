from xml.etree import ElementTree

from salientcodec.callbacks import History
from salientcodec.tools.rate_accuracy import RateAccuracyCurve
from salientcodec.tools.visualization import (curves_to_csv, emit_curves, plot_training_history,
                                              read_curves_csv)
from salientcodec.utils.errors import InputError

import os
import pytest

CURVES = [RateAccuracyCurve('anchor', [(0.1, 30.0), (0.2, 40.0), (0.4, 48.0), (0.8, 53.0)]),
          RateAccuracyCurve('saliency', [(0.05, 31.5), (0.1, 40.25), (0.2, 48.0), (0.4, 52.0)])]


def test_csv_round_trip(tmp_path):
    path = tmp_path / 'curves.csv'
    path.write_text(curves_to_csv(CURVES))
    assert read_curves_csv(str(path)) == CURVES
    assert path.read_text().splitlines()[0] == 'codec,label,bpp,accuracy'


def test_bad_csv(tmp_path):
    path = tmp_path / 'curves.csv'
    path.write_text('codec,bpp\nanchor,0.1\n')
    with pytest.raises(InputError):
        read_curves_csv(str(path))
    path.write_text('codec,label,bpp,accuracy\nanchor,wAP,fast,30\n')
    with pytest.raises(InputError):
        read_curves_csv(str(path))
    with pytest.raises(InputError):
        read_curves_csv(str(tmp_path / 'absent.csv'))


def test_emit_curves(tmp_path):
    csv_path, svg_path = emit_curves(CURVES, str(tmp_path / 'run1' / 'curves.png'))
    assert csv_path.endswith('curves.csv') and svg_path.endswith('curves.svg')
    assert read_curves_csv(csv_path) == CURVES
    root = ElementTree.parse(svg_path).getroot()
    ids = sorted(el.get('id') for el in root.iter() if (el.get('id') or '').startswith('series-'))
    assert ids == ['series-anchor', 'series-saliency']


def test_emit_curves_is_deterministic(tmp_path):
    _, first = emit_curves(CURVES, str(tmp_path / 'a'))
    _, second = emit_curves(CURVES, str(tmp_path / 'b'))
    with open(first, 'rb') as a, open(second, 'rb') as b:
        assert a.read() == b.read()


def test_plot_training_history(tmp_path):
    history = History()
    history.history = [{'loss_total': 2.0}, {'loss_total': 1.0}]
    path = str(tmp_path / 'history.png')
    plot_training_history({'run': history}, filepath=path, save=True, show=False,
                          other=[3.0, 2.5])
    assert os.path.getsize(path) > 0
    with pytest.raises(ValueError):
        plot_training_history({'run': [{'bpp': 1.0}]}, show=False)
