"""Error taxonomy for result and trace output.

The CLI exits with code 1 on any of them.
"""

from ..errors import CrShareError


class StorageError(CrShareError):
    """Base class for all output storage errors."""


class StorageWriteError(StorageError):
    """A report or trace could not be written."""
