"""Unitary t-designs and t-RB noise metrics (C++ core)."""

from ._tdesign import *  # noqa: F401,F403
from ._tdesign import __doc__  # noqa: F401
