"""Timestamp sources.

All engine timestamps are UTC milliseconds. ``TickClock`` replaces wall time
in mock/replay runs so that session files are byte-reproducible.
"""

from __future__ import annotations

import time


class SystemClock:
    """Wall-clock time in UTC milliseconds."""

    def now_ms(self) -> int:
        return time.time_ns() // 1_000_000


class TickClock:
    """Deterministic logical clock: each call advances by a fixed step."""

    def __init__(self, start: int = 0, step: int = 1):
        self._next = start
        self._step = step

    def now_ms(self) -> int:
        value = self._next
        self._next += self._step
        return value
