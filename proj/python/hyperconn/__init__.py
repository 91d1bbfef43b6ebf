"""Connectomes and entropic total-correlation hyper-connectomes."""

from ._hyperconn import *  # noqa: F401,F403
from ._hyperconn import __version__  # noqa: F401
