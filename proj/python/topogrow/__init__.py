"""Procedural generation and verification of topology-labeled 3D datasets."""

from topogrow._core import *  # noqa: F401,F403
from topogrow._core import __doc__  # noqa: F401

__version__ = "0.1.0"
