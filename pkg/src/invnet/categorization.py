"""Mapping of investors and trades onto the 99 investor categories."""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

from .model import AGE_BOUNDS, CATEGORIES, SECTOR_GROUP, CategoryId, Group, Region, Sector


class CategorizationError(ValueError):
    """A record cannot be placed in any category."""


@dataclass(frozen=True)
class InvestorMeta:
    sector: Sector
    birth_year: int | None
    region: Region

    def __post_init__(self):
        if (self.birth_year is not None) != (self.sector is Sector.HOUSEHOLD):
            raise CategorizationError(
                f"birth_year must be given exactly for households, got {self}"
            )


def age_group(birth_year: int, trade_date: dt.date, record: str = "") -> Group:
    """Household age group on ``trade_date``.

    Age is the calendar-year difference; only the birth year is known.
    Ages outside (0, inf) are data errors.
    """
    age = trade_date.year - birth_year
    for group, lo, hi in AGE_BOUNDS:
        if lo < age <= hi:
            return group
    where = f" ({record})" if record else ""
    raise CategorizationError(
        f"age {age} from birth year {birth_year} at {trade_date} is not positive{where}"
    )


def assign_category(meta, trade_date: dt.date) -> CategoryId:
    """Category of a trade made on ``trade_date`` by an investor described by ``meta``.

    ``meta`` is anything with ``sector``, ``birth_year`` and ``region``
    attributes (an :class:`InvestorMeta` or a :class:`Transaction`).
    """
    record = getattr(meta, "investor_id", "")
    if meta.sector is Sector.HOUSEHOLD:
        if meta.birth_year is None:
            raise CategorizationError(f"household without birth year ({record})")
        return CategoryId(age_group(meta.birth_year, trade_date, record), meta.region)
    return CategoryId(SECTOR_GROUP[meta.sector], meta.region)


def category_universe() -> list[CategoryId]:
    return list(CATEGORIES)
