"""Public surface for crshare.storage."""

from .errors import StorageError, StorageWriteError
from .local import LocalFileStorage

__all__ = [
    "LocalFileStorage",
    "StorageError",
    "StorageWriteError",
]
