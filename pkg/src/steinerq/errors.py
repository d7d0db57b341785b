"""Shared exception hierarchy.

Every domain error raised by the library derives from SteinerqError so the
CLI can map them uniformly to exit status 1 while surfacing the class name.
"""


class SteinerqError(Exception):
    """Base class for all domain errors of this package."""


class DeskScaleExceeded(SteinerqError):
    """Input is larger than the point/word-size budget the kernels support."""
