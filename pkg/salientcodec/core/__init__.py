"""
File: __init__.py
Description: tensor-autodiff core
"""

from __future__ import absolute_import

from .tensor import *
from .parameters import *
from .layers import *
from .metrics import *
from .gradcheck import *
from . import functional
