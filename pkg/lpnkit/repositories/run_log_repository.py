"""
Repository for run logs: one JSON object per line, UTF-8.

The first record of a run is its resolved configuration and the last one
its result. Records are pydantic models; writers on several threads are
serialized through a lock.
"""

import json
import logging
import threading
from pathlib import Path
from typing import IO, Any

from pydantic import BaseModel

logger = logging.getLogger(__name__)

# fields that vary between otherwise identical runs
TIMING_FIELDS: frozenset[str] = frozenset({"wall_ms", "wall_seconds", "phase_seconds"})


def strip_timings(value: Any) -> Any:
    """Copy of a decoded record with every timing field removed, recursively."""
    if isinstance(value, dict):
        return {k: strip_timings(v) for k, v in value.items() if k not in TIMING_FIELDS}
    if isinstance(value, list):
        return [strip_timings(v) for v in value]
    return value


class RunLogRepository:
    """
    Single-writer JSON-lines sink.

    Records are kept in memory as dicts and, when a path or stream is
    given, appended to it as they arrive.
    """

    def __init__(self, path: str | Path | None = None, stream: IO[str] | None = None):
        """
        Initialize repository.

        Args:
            path: File the log is written to (truncated on open)
            stream: Text stream to mirror records to, e.g. stdout
        """
        self.path = Path(path) if path is not None else None
        self.stream = stream
        self.records: list[dict[str, Any]] = []
        self._lock = threading.Lock()
        self._handle: IO[str] | None = None
        if self.path is not None:
            self._handle = open(self.path, "w", encoding="utf-8")

    def append(self, record: BaseModel) -> dict[str, Any]:
        """Serialize and write one record; returns its decoded form."""
        line = record.model_dump_json()
        decoded = json.loads(line)
        with self._lock:
            self.records.append(decoded)
            for sink in (self._handle, self.stream):
                if sink is not None:
                    sink.write(line + "\n")
                    sink.flush()
        return decoded

    def close(self) -> None:
        with self._lock:
            if self._handle is not None:
                self._handle.close()
                self._handle = None

    def __enter__(self) -> "RunLogRepository":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    @staticmethod
    def read(path: str | Path) -> list[dict[str, Any]]:
        """Decode every record of a run-log file."""
        with open(path, encoding="utf-8") as handle:
            return [json.loads(line) for line in handle if line.strip()]
