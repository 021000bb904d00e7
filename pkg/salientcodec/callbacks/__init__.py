"""
File: __init__.py
Description: training callbacks
"""

from __future__ import absolute_import

from .callback import *
from .history import *
from .progbar_logger import *
from .callback_list import *
from .csv_logger import *
from .model_checkpoint import *
