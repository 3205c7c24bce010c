"""Feedback-coupled memory system simulation and stability analysis."""

from ._fcms import *  # noqa: F401,F403
from ._fcms import __version__  # noqa: F401
