"""Python bindings for the vplab C++ core."""

from ._vplab import *  # noqa: F401,F403
from ._vplab import __doc__  # noqa: F401
