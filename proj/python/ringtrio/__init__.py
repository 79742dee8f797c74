"""Three repulsive bosons in a circular trap: classical, semiclassical and
quantum analyses of the reduced two-degree-of-freedom problem."""

from ._ringtrio import *  # noqa: F401,F403
from ._ringtrio import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"
