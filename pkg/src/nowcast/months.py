"""Calendar-month arithmetic.

A month is an absolute integer index (year * 12 + month - 1) so lags and
ranges are plain integer math.  Strings use the ``YYYY-MM`` form everywhere
(CSV files, config, CLI).
"""

from __future__ import annotations

import datetime as dt
import re

from .errors import DataError

_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")


def month_from_str(text: str) -> int:
    m = _MONTH_RE.match(text.strip())
    if not m:
        raise DataError(f"invalid month {text!r}: expected YYYY-MM")
    year, mon = int(m.group(1)), int(m.group(2))
    if not 1 <= mon <= 12:
        raise DataError(f"invalid month {text!r}: month must be 01..12")
    return year * 12 + mon - 1


def month_to_str(month: int) -> str:
    return f"{month // 12:04d}-{month % 12 + 1:02d}"


def month_first_day(month: int) -> dt.date:
    """First calendar day of the month, the natural 'as published on' stamp."""
    return dt.date(month // 12, month % 12 + 1, 1)


def month_mid(month: int) -> dt.date:
    """The 15th; used for mid-month statistical releases."""
    return dt.date(month // 12, month % 12 + 1, 15)


def calendar_month(month: int) -> int:
    """Calendar month number 1..12, for seasonal indexing."""
    return month % 12 + 1


def parse_date(text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text.strip())
    except ValueError as exc:
        raise DataError(f"invalid date {text!r}: expected YYYY-MM-DD") from exc
