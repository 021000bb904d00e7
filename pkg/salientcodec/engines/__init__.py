"""
File: __init__.py
Description: losses, optimizer, training engines and the training schedule
"""
from __future__ import absolute_import

from .losses import *
from .optimizer import *
from .trainer import *
from .schedule import *
