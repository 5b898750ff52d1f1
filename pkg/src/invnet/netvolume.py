"""Net traded volume matrices, transaction resampling and time windows."""
from __future__ import annotations

import datetime as dt
import logging
import warnings

import numpy as np

from .model import CATEGORIES, NetVolumeMatrix, TransactionTable, as_table

log = logging.getLogger(__name__)


def replica_seed(root: int, replica: int) -> np.random.SeedSequence:
    """Independent substream for one replica, reproducible from (root, replica)."""
    return np.random.SeedSequence(int(root), spawn_key=(int(replica),))


def trading_calendar(transactions, start=None, end=None) -> np.ndarray:
    """Distinct trade dates in ``[start, end)``, ascending."""
    d = as_table(transactions).dates
    if start is not None:
        d = d[d >= np.datetime64(start, "D")]
    if end is not None:
        d = d[d < np.datetime64(end, "D")]
    return np.unique(d)


def day_rows(tx: TransactionTable, calendar: np.ndarray) -> np.ndarray:
    """Row index into ``calendar`` of every transaction date."""
    if not len(tx):
        return np.zeros(0, dtype=np.intp)
    rows = np.searchsorted(calendar, tx.dates)
    bad = (rows >= len(calendar)) | (calendar[np.minimum(rows, len(calendar) - 1)] != tx.dates) \
        if len(calendar) else np.ones(len(tx), bool)
    if bad.any():
        first = tx.dates[np.argmax(bad)]
        raise ValueError(f"{int(bad.sum())} transaction(s) dated outside the calendar, e.g. {first}")
    return rows


def accumulate(rows, category, volume, n_days: int, n_categories: int) -> np.ndarray:
    values = np.zeros(n_days * n_categories, dtype=np.int64)
    np.add.at(values, rows * n_categories + category, volume)
    return values.reshape(n_days, n_categories)


def build_net_volume(transactions, calendar=None, categories=CATEGORIES) -> NetVolumeMatrix:
    """Sum signed volumes per (day, category).

    With no ``calendar`` the distinct trade dates of ``transactions`` are used.
    """
    tx = as_table(transactions)
    cal = trading_calendar(tx) if calendar is None else np.asarray(calendar, "datetime64[D]")
    rows = day_rows(tx, cal)
    if len(tx) and tx.category.max() >= len(categories):
        raise ValueError("transaction category outside the node universe")
    values = accumulate(rows, tx.category.astype(np.intp), tx.volume, len(cal), len(categories))
    return NetVolumeMatrix(cal, values, tuple(categories))


def _rng(seed):
    return np.random.default_rng(seed)


def bootstrap_resample(transactions, seed) -> TransactionTable:
    """Uniform resample of whole transaction records, with replacement."""
    tx = as_table(transactions)
    if not len(tx):
        raise ValueError("cannot bootstrap an empty transaction set")
    rng = _rng(seed)
    return tx.take(rng.integers(0, len(tx), size=len(tx)))


def null_indices(n: int, seed) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Independent row draws for the date, volume and attribute columns."""
    rng = _rng(seed)
    return (rng.integers(0, n, size=n), rng.integers(0, n, size=n),
            rng.integers(0, n, size=n))


def null_resample(transactions, seed) -> TransactionTable:
    """Resample dates, volumes and investor attributes independently.

    The investor attribute block (sector, birth year, region, identity and
    the resolved category) moves as one unit, so the category is not
    recomputed against the new date.
    """
    tx = as_table(transactions)
    n = len(tx)
    if not n:
        raise ValueError("cannot null-resample an empty transaction set")
    i_date, i_vol, i_attr = null_indices(n, seed)
    return TransactionTable(
        dates=tx.dates[i_date],
        category=tx.category[i_attr],
        volume=tx.volume[i_vol],
        sector=tx.sector[i_attr],
        birth_year=tx.birth_year[i_attr],
        region=tx.region[i_attr],
        investor=tx.investor[i_attr],
        security=tx.security[i_attr],
    )


def _add_months(d: dt.date, months: int) -> dt.date:
    y, m = divmod(d.month - 1 + months, 12)
    return dt.date(d.year + y, m + 1, 1)


def month_windows(start: dt.date, end: dt.date, months: int | None):
    """Non-overlapping windows ``[lo, hi)`` of whole calendar months.

    ``start`` is snapped to the first of its month. ``months=None`` gives a
    single window covering ``[start, end)``. A trailing partial window is
    dropped with a warning.
    """
    if months is None:
        return [(start, end)]
    if months < 1:
        raise ValueError("window length must be at least one month")
    lo = dt.date(start.year, start.month, 1)
    out = []
    while True:
        hi = _add_months(lo, months)
        if hi > end:
            break
        out.append((lo, hi))
        lo = hi
    if lo < end:
        warnings.warn(f"partial window {lo}..{end} excluded; windows must tile the period")
    return out
