"""
File: __init__.py
Description: saliency-driven hierarchical image codec for machine consumers
"""
from __future__ import absolute_import

from .runtime import *
from .utils import *
from .core import *
from .masks import *
from .entropy import *
from .models import *
from .callbacks import *
from .engines import *
from .datasets import *
from .tools import *

__version__ = '0.1.0'
