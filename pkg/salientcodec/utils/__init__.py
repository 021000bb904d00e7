"""
File: __init__.py
Description: 
"""

from __future__ import absolute_import

from .errors import *
from .validation import *
from .noindent_encoder import *
from .fileio import *
from .imageio import *
