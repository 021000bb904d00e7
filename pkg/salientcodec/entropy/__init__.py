"""
File: __init__.py
Description: entropy models, range coder and the bitstream container
"""

from __future__ import absolute_import

from .range_coder import *
from .gaussian_conditional import *
from .factorized_prior import *
from .rate import *
from .mask_signal import *
from .bitstream import *
