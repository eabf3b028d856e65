"""SQLite-backed MessageTracer.

Persists every :class:`~crshare.observability.TraceEvent` to a local
``messages`` table, indexed for the usual replay queries:

- One overload episode:
  ``SELECT * FROM messages WHERE request_id = ? ORDER BY id``
- Traffic by kind: ``SELECT kind, COUNT(*) FROM messages GROUP BY kind``
- Everything a node sent: ``SELECT * FROM messages WHERE src = ?``

Schema
------
::

    CREATE TABLE messages (
        id         INTEGER PRIMARY KEY,
        time       REAL NOT NULL,     -- simulated seconds
        kind       TEXT NOT NULL,
        src        TEXT NOT NULL,
        dst        TEXT NOT NULL,
        request_id INTEGER NOT NULL,
        summary    TEXT
    );

Usage
-----
::

    from crshare.contrib.sqlite_tracer import SqliteMessageTracer
    from crshare.engine import run

    with SqliteMessageTracer("trace.db") as tracer:
        run(scenario, tracer=tracer)
"""

from __future__ import annotations

try:
    import sqlite3
except ImportError as _exc:  # pragma: no cover
    raise ImportError(
        "sqlite3 is required for SqliteMessageTracer but is not available "
        "in this Python environment."
    ) from _exc

from pathlib import Path

from ..observability import TraceEvent

_DDL = """\
CREATE TABLE IF NOT EXISTS messages (
    id         INTEGER PRIMARY KEY,
    time       REAL NOT NULL,
    kind       TEXT NOT NULL,
    src        TEXT NOT NULL,
    dst        TEXT NOT NULL,
    request_id INTEGER NOT NULL,
    summary    TEXT
);
CREATE INDEX IF NOT EXISTS idx_messages_request ON messages (request_id);
CREATE INDEX IF NOT EXISTS idx_messages_kind    ON messages (kind);
CREATE INDEX IF NOT EXISTS idx_messages_src     ON messages (src);
"""

_INSERT = """\
INSERT INTO messages (time, kind, src, dst, request_id, summary)
VALUES (?, ?, ?, ?, ?, ?)
"""


class SqliteMessageTracer:
    """Append-only SQLite tracer.

    Rows are buffered and written in batches of ``batch_size``; ``flush``,
    ``query`` and ``close`` write out the remainder.

    Args:
        db_path: Database file, created if absent. ``":memory:"`` keeps it
            in memory (useful in tests).
        batch_size: Rows per committed batch.
    """

    def __init__(self, db_path: str | Path, batch_size: int = 1000) -> None:
        if batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {batch_size}")
        self._conn = sqlite3.connect(str(db_path))
        self._conn.executescript(_DDL)
        self._conn.commit()
        self._batch_size = batch_size
        self._buffer: list[tuple[float, str, str, str, int, str]] = []

    def record(self, event: TraceEvent) -> None:
        self._buffer.append(
            (
                event.time,
                event.kind,
                event.src,
                event.dst,
                event.request_id,
                event.summary,
            )
        )
        if len(self._buffer) >= self._batch_size:
            self.flush()

    def flush(self) -> None:
        if self._buffer:
            self._conn.executemany(_INSERT, self._buffer)
            self._conn.commit()
            self._buffer.clear()

    def query(
        self, sql: str, params: tuple[object, ...] = ()
    ) -> list[tuple[object, ...]]:
        """Run *sql* against the trace and return all rows."""
        self.flush()
        return self._conn.execute(sql, params).fetchall()

    def close(self) -> None:
        self.flush()
        self._conn.close()

    def __enter__(self) -> SqliteMessageTracer:
        return self

    def __exit__(self, *_: object) -> None:
        self.close()
