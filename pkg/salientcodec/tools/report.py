"""
File: report.py
Description: plain-text BD-rate table, one row per codec against the anchor
"""

from __future__ import absolute_import

from typing import Dict, Sequence, Tuple

from salientcodec.tools.rate_accuracy import BDResult, RateAccuracyCurve, bd_table

HEADER = ('Codec', 'Train loss', 'Train mask', 'Inf. mask', 'BDR wAP')


def format_bd(result) -> str:
    if isinstance(result, BDResult):
        # + 0.0 turns a negative zero into 0.0
        return f'{round(result.value, 1) + 0.0:.1f}%'
    return 'no overlap'


def format_bd_table(anchor: RateAccuracyCurve, curves: Sequence[RateAccuracyCurve],
                    descriptors: Dict[str, Tuple[str, str, str]] = None,
                    method: str = 'polynomial') -> str:
    """format_bd_table.
        Fixed-width table, anchor row first. descriptors maps a codec label to
        its (train loss, train mask, inference mask) description.
    """
    descriptors = descriptors or {}
    results = bd_table(anchor, [c for c in curves if c.label != anchor.label], method)
    rows = [HEADER]
    for label, result in results.items():
        train_loss, train_mask, inf_mask = descriptors.get(label, ('-', '-', '-'))
        rows.append((label, train_loss, train_mask, inf_mask, format_bd(result)))
    widths = [max(len(row[i]) for row in rows) for i in range(len(HEADER))]

    def line(row):
        cells = [row[i].ljust(widths[i]) for i in range(len(HEADER) - 1)]
        cells.append(row[-1].rjust(widths[-1]))
        return '  '.join(cells)

    out = [f'BD-rate against {anchor.label} ({method} fit)', line(rows[0]),
           '  '.join('-' * w for w in widths)]
    out.extend(line(row) for row in rows[1:])
    return '\n'.join(out) + '\n'
