"""
File: __init__.py
Description: synthetic scenes and the simulated detector
"""

from __future__ import absolute_import

from .synthetic import *
