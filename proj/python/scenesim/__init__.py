"""Noncoherent over-the-air aggregation of soft labels.

Thin bindings over the C++ library. Labels are passed as lists of
probability vectors; populations as lists of DeviceProfile.
"""

from ._core import *  # noqa: F401,F403
from ._core import SceneError, __doc__  # noqa: F401

__version__ = "0.1.0"
