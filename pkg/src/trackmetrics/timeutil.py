from __future__ import annotations

from datetime import date, datetime, timedelta, timezone


def local_date(ts_ms: float, tz_offset_hours: float = 0.0) -> date:
    """Calendar day of a millisecond timestamp in a fixed-offset local time."""
    tz = timezone(timedelta(hours=tz_offset_hours))
    return datetime.fromtimestamp(ts_ms / 1000.0, tz=tz).date()
