"""Phase retrieval from Fourier-type phaseless measurements."""

from ._core import *  # noqa: F401,F403
from ._core import MeasurementSet

__all__ = [name for name in dir() if not name.startswith("_")] + ["MeasurementSet"]
