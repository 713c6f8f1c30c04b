"""Goal-oriented finite elements with trained test-space weights."""

from ._goalfem import *  # noqa: F401,F403
from ._goalfem import __doc__  # noqa: F401

__version__ = "0.1.0"
