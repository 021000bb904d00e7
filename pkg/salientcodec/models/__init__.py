"""
File: __init__.py
Description: codec graph, proxy task network and checkpoints
"""

from __future__ import absolute_import

from .config import *
from .latents import *
from .codec import *
from .proxy import *
from .checkpoint import *
