"""
File: __init__.py
Description: saliency masks and the criteria producing them
"""

from __future__ import absolute_import

from .saliency_mask import *
from .criteria import *
from .io import *
