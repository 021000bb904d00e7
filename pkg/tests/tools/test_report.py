from salientcodec.tools.rate_accuracy import RateAccuracyCurve
from salientcodec.tools.report import format_bd, format_bd_table
from salientcodec.utils.errors import NoOverlapError

import os

DATA = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'data')

ANCHOR = RateAccuracyCurve('anchor', [(0.1, 30.0), (0.2, 40.0), (0.4, 48.0), (0.8, 53.0)])


def test_table_matches_golden_file():
    half = ANCHOR.scaled(0.5, 'half')
    far = RateAccuracyCurve('far', [(0.1, 60.0), (0.2, 65.0), (0.4, 70.0), (0.8, 75.0)])
    table = format_bd_table(ANCHOR, [ANCHOR, half, far],
                            {'half': ('task', 'gt', 'detections')})
    with open(os.path.join(DATA, 'bd_table.txt')) as f:
        assert table == f.read()


def test_format_bd():
    assert format_bd(NoOverlapError('x')) == 'no overlap'


def test_pchip_title():
    table = format_bd_table(ANCHOR, [ANCHOR.scaled(2.0, 'double')], method='pchip')
    lines = table.splitlines()
    assert lines[0] == 'BD-rate against anchor (pchip fit)'
    assert lines[-1].startswith('double') and lines[-1].endswith('100.0%')
