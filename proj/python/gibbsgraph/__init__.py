"""Repulsive Gibbs point processes through hard-core models on random graphs.

Regions, potentials, instances and graphs are plain dicts in the same shapes
as the JSON files the command-line tool reads and writes.
"""

from ._core import *  # noqa: F401,F403
from ._core import ConfigError, SizeLimitError  # noqa: F401

__version__ = "0.1.0"
