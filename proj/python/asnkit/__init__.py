"""Toolkit for measuring community-detection output similarity and building
algorithm similarity networks."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
