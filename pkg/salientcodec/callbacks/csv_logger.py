"""
File: csv_logger.py
Description: per-epoch training log as CSV, rewritten atomically after every epoch
"""

from __future__ import absolute_import

from .callback import Callback
from salientcodec.utils.fileio import atomic_write

import csv

LOG_COLUMNS = ('epoch', 'phase', 'loss_total', 'loss_task', 'loss_mse', 'loss_msssim',
               'bpp_estimate')


class CSVLogger(Callback):
    def __init__(self, filepath, columns=LOG_COLUMNS):
        super(CSVLogger, self).__init__()
        self.filepath = filepath
        self.columns = tuple(columns)
        self.rows = []

    def on_epoch_end(self, epoch, logs=None):
        logs = logs or {}
        self.rows.append([self._format(logs.get(key, '')) for key in self.columns])
        self._flush()

    @staticmethod
    def _format(value):
        if isinstance(value, float):
            return repr(value)
        return value

    def _flush(self):
        with atomic_write(self.filepath, 'w') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(self.columns)
            writer.writerows(self.rows)


def read_training_log(filepath):
    """rows of a CSVLogger file as dicts; numeric fields parsed"""
    rows = []
    with open(filepath, 'r', newline='') as f:
        for row in csv.DictReader(f):
            parsed = {}
            for key, value in row.items():
                if value == '':
                    parsed[key] = None
                elif key == 'phase':
                    parsed[key] = value
                elif key == 'epoch':
                    parsed[key] = int(value)
                else:
                    parsed[key] = float(value)
            rows.append(parsed)
    return rows
