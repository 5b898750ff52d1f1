"""Gaussian mutual information between net-volume series and its permutation null."""
from __future__ import annotations

import math

import numpy as np

from .model import CATEGORIES, MIMatrix, NetVolumeMatrix, as_table
from .netvolume import accumulate, day_rows, null_indices, trading_calendar

RHO_CLAMP = 1e-12
MIN_ACTIVE_DAYS = 5
# spawn-key tag separating null streams from bootstrap streams
_NULL_STREAM = 1_000_003


class IneligiblePair(ValueError):
    """A series has zero variance, so correlation is undefined."""


def pearson(x, y) -> float:
    """Pearson correlation from centred sums."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 2:
        raise ValueError("need two 1-d series of equal length >= 2")
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = (dx * dx).sum(), (dy * dy).sum()
    if sxx == 0 or syy == 0:
        raise IneligiblePair("zero variance")
    # sqrt of the product keeps x = y at exactly 1
    rho = (dx * dy).sum() / np.sqrt(sxx * syy)
    return float(min(1.0, max(-1.0, rho)))


def mi_from_rho(rho: float) -> float:
    """MI in nats of a bivariate normal with correlation ``rho``."""
    if not -1.0 <= rho <= 1.0:
        raise ValueError(f"correlation out of range: {rho}")
    r2 = min(rho * rho, (1.0 - RHO_CLAMP) ** 2)
    return -0.5 * math.log1p(-r2)


def eligible_nodes(values: np.ndarray, min_active_days: int = MIN_ACTIVE_DAYS) -> np.ndarray:
    v = np.asarray(values)
    active = np.count_nonzero(v, axis=0)
    return (v.std(axis=0) > 0) & (active >= min_active_days)


def mi_matrix(m: NetVolumeMatrix, min_active_days: int = MIN_ACTIVE_DAYS) -> MIMatrix:
    """Pairwise MI over eligible categories; other entries are NaN.

    A node is eligible when its series has positive variance and at least
    ``min_active_days`` days of nonzero net volume.
    """
    x = np.asarray(m.values, dtype=float)
    if x.shape[0] < 2:
        raise ValueError("need at least two days to estimate correlations")
    ok = eligible_nodes(x, min_active_days)
    if ok.sum() < 2:
        raise ValueError(f"only {int(ok.sum())} eligible categories, need 2")
    n = x.shape[1]
    sub = x[:, ok]
    z = sub - sub.mean(axis=0)
    z /= np.sqrt((z * z).mean(axis=0))
    rho = np.clip(z.T @ z / len(z), -1.0, 1.0)
    sat = np.abs(rho) >= 1.0 - RHO_CLAMP
    r2 = np.minimum(rho * rho, (1.0 - RHO_CLAMP) ** 2)
    mi = -0.5 * np.log1p(-r2)

    values = np.full((n, n), np.nan)
    saturated = np.zeros((n, n), dtype=bool)
    idx = np.flatnonzero(ok)
    values[np.ix_(idx, idx)] = mi
    saturated[np.ix_(idx, idx)] = sat
    np.fill_diagonal(values, np.nan)
    np.fill_diagonal(saturated, False)
    return MIMatrix(values, ok, saturated, tuple(m.categories))


def null_mi_distribution(transactions, replicas: int = 100, calendar=None, seed=0,
                         min_active_days: int = MIN_ACTIVE_DAYS) -> np.ndarray:
    """Pooled pairwise MI values over ``replicas`` null resamples, sorted.

    Replicas whose resample leaves fewer than two eligible nodes contribute
    nothing.
    """
    if replicas < 1:
        raise ValueError("need at least one null replica")
    tx = as_table(transactions)
    if not len(tx):
        raise ValueError("cannot null-resample an empty transaction set")
    cal = trading_calendar(tx) if calendar is None else np.asarray(calendar, "datetime64[D]")
    # integer-coded equivalent of null_resample -> build_net_volume
    rows = day_rows(tx, cal)
    cats = tx.category.astype(np.intp)
    n_cat = len(CATEGORIES)
    pooled = []
    for r in range(replicas):
        ss = null_seed(seed, r)
        i_date, i_vol, i_attr = null_indices(len(tx), ss)
        values = accumulate(rows[i_date], cats[i_attr], tx.volume[i_vol], len(cal), n_cat)
        try:
            pooled.append(mi_matrix(NetVolumeMatrix(cal, values), min_active_days).pair_values())
        except ValueError:
            continue
    if not pooled:
        return np.empty(0)
    return np.sort(np.concatenate(pooled))


def null_seed(seed, replica: int) -> np.random.SeedSequence:
    """Seed used for null replica ``replica`` under a parent ``seed``."""
    root = seed.entropy if isinstance(seed, np.random.SeedSequence) else seed
    key = seed.spawn_key if isinstance(seed, np.random.SeedSequence) else ()
    return np.random.SeedSequence(root, spawn_key=(*key, _NULL_STREAM, replica))


def null_threshold(null, alpha_mi: float) -> float:
    """Empirical (1 - alpha_mi) quantile, rounding up to an observed value."""
    null = np.asarray(null)
    if not len(null):
        raise ValueError("empty null distribution")
    if alpha_mi >= 1.0:
        return -np.inf
    return float(np.quantile(null, 1.0 - alpha_mi, method="higher"))


def significance_mask(mi: MIMatrix, null, alpha_mi: float = 0.01) -> np.ndarray:
    """True where MI exceeds the null's (1 - alpha_mi) quantile."""
    cut = null_threshold(null, alpha_mi)
    with np.errstate(invalid="ignore"):
        mask = mi.values > cut
    mask &= ~np.isnan(mi.values)
    return mask
