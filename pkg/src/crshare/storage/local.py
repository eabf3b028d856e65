"""LocalFileStorage: run outputs on the local filesystem.

Every file is written to a temporary sibling and renamed over its target
with ``os.replace``, so a reader never sees a half-written report.
``sync=True`` also fsyncs before the rename.
"""

from __future__ import annotations

import os
import tempfile
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import TextIO

from .errors import StorageWriteError


class LocalFileStorage:
    """Filesystem storage rooted at one output directory.

    Args:
        root: Output directory; created on first write.
        sync: fsync each file before it replaces its target.
    """

    def __init__(self, root: Path | str, *, sync: bool = True) -> None:
        self._root = Path(root)
        self._sync = sync

    @classmethod
    def for_file(
        cls, path: Path | str, *, sync: bool = True
    ) -> tuple[LocalFileStorage, str]:
        """Storage rooted at *path*'s directory, and the key of *path*."""
        p = Path(path)
        return cls(p.parent, sync=sync), p.name

    @property
    def root(self) -> Path:
        return self._root

    def _resolve(self, key: str) -> Path:
        if os.path.isabs(key):
            raise ValueError(f"output key must be relative, got: {key!r}")
        if ".." in Path(key).parts:
            raise ValueError(f"output key must not contain '..', got: {key!r}")
        return self._root / key

    @contextmanager
    def open_text(self, key: str) -> Iterator[TextIO]:
        """Stream UTF-8 text into *key*.

        The file replaces its target when the block exits, also when the
        block raises: a run that stops on a fault keeps the trace it wrote
        up to that point.

        Raises:
            StorageWriteError: the file could not be created or published.
            ValueError: *key* is absolute or contains ``..``.
        """
        target = self._resolve(key)
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=target.parent, prefix="._crshare_")
        except OSError as exc:
            raise StorageWriteError(
                f"cannot write {str(target)!r}: {exc}"
            ) from exc
        stream = os.fdopen(fd, "w", encoding="utf-8", newline="")
        try:
            yield stream
        finally:
            self._publish(stream, tmp, target)

    def _publish(self, stream: TextIO, tmp: str, target: Path) -> None:
        try:
            try:
                stream.flush()
                if self._sync:
                    os.fsync(stream.fileno())
            finally:
                stream.close()
            os.replace(tmp, target)
        except OSError as exc:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise StorageWriteError(
                f"cannot write {str(target)!r}: {exc}"
            ) from exc

    def write_text(self, key: str, text: str) -> None:
        with self.open_text(key) as stream:
            stream.write(text)
