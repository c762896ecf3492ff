"""Injectable time sources.

Domain time is integer unix milliseconds, UTC. Calendar dates (value
dates, history windows) are ISO "YYYY-MM-DD" strings, which sort
lexicographically in chronological order.
"""

from __future__ import annotations

import time
from datetime import date, datetime, timezone

from .errors import BankError

DAY_MS = 86_400_000
RETENTION_DAYS = 90


class SystemClock:
    def now_ms(self) -> int:
        return int(time.time() * 1000)


class ManualClock:
    """Deterministic clock for tests and offline processing."""

    def __init__(self, start_ms: int = 1_700_000_000_000):
        self._now_ms = start_ms

    def now_ms(self) -> int:
        return self._now_ms

    def advance(self, seconds: float) -> None:
        self._now_ms += int(seconds * 1000)

    def advance_days(self, days: int) -> None:
        self._now_ms += days * DAY_MS

    def set_ms(self, ms: int) -> None:
        self._now_ms = ms


def ms_to_date(ms: int) -> str:
    return datetime.fromtimestamp(ms / 1000, tz=timezone.utc).date().isoformat()

def ms_to_iso(ms: int) -> str:
    return datetime.fromtimestamp(ms / 1000, tz=timezone.utc).isoformat(timespec="milliseconds")

def parse_date(text: str) -> str:
    """Validate an ISO date string, returning it normalized."""
    try:
        return date.fromisoformat(text).isoformat()
    except (TypeError, ValueError) as exc:
        raise BankError("SCHEMA_VIOLATION", f"not an ISO date: {text!r}") from exc

def date_start_ms(d: str) -> int:
    dt = datetime.combine(date.fromisoformat(d), datetime.min.time(), tzinfo=timezone.utc)
    return int(dt.timestamp() * 1000)

def date_end_ms(d: str) -> int:
    # inclusive end of day
    return date_start_ms(d) + DAY_MS - 1


def clamp_window(frm: str, to: str, now_ms: int, retention_days: int = RETENTION_DAYS) -> tuple[int, int]:
    """Resolve a [from, to] date window to millisecond bounds.

    The lower bound is clamped to the retention horizon and the upper
    bound to "now": items older than the horizon are never visible,
    whatever window the caller asked for.
    """
    lo = max(date_start_ms(frm), now_ms - retention_days * DAY_MS)
    hi = min(date_end_ms(to), now_ms)
    return lo, hi
