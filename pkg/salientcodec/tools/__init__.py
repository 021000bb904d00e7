"""
File: __init__.py
Description: evaluation harness
"""
from __future__ import absolute_import

from .rate_accuracy import *
from .visualization import *
from .report import *
from .experiments import *
