"""Judgment-hole simulation and repair for conversational search collections.

The heavy lifting lives in the C++ extension module; this package re-exports
its public surface.
"""

from refill._core import *  # noqa: F401,F403
from refill._core import __all__  # noqa: F401
