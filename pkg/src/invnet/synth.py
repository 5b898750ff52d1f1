"""Synthetic transaction data with planted category couplings.

Latent daily net volumes are standard normal per (security, day, category),
scaled and rounded to whole shares. A planted pair ``(a, b, rho)`` replaces
b's latent series by ``rho * z_a + sqrt(1 - rho**2) * e`` on the days where
the pair is active. Every nonzero daily net volume is then split into a
few trades of the same sign whose sum is exactly that volume, so summing
the trades back per day reproduces the rounded latent matrix without loss.
Same-signed splits keep a resampled day close to the original one, which
is what makes transaction-level bootstrapping informative.
"""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import (AGE_BOUNDS, CATEGORIES, CategoryId, NetVolumeMatrix, Region, Sector,
                    TransactionTable)

_SECTORS = tuple(Sector)
_REGIONS = tuple(Region)
_RETIRED_MAX_AGE = 90


def synthetic_postal_codes(region: Region) -> list[str]:
    r = _REGIONS.index(region)
    return [f"{10 * (r + 1):02d}{k:03d}" for k in (100, 200, 300)]


SYNTH_POSTAL_MAP = {code: reg for reg in _REGIONS for code in synthetic_postal_codes(reg)}


@dataclass(frozen=True)
class PlantedPair:
    """Coupling between two categories.

    ``windows`` lists half-open date ranges where the coupling holds (all
    days when None); ``securities`` restricts it to some security indices.
    """

    a: CategoryId
    b: CategoryId
    rho: float
    windows: tuple | None = None
    securities: tuple | None = None

    def __post_init__(self):
        if not -1.0 < self.rho < 1.0:
            raise ValueError(f"planted coupling must satisfy |rho| < 1, got {self.rho}")
        if self.a == self.b:
            raise ValueError("planted pair needs two distinct categories")

    @property
    def key(self) -> tuple[int, int]:
        return tuple(sorted((self.a.index, self.b.index)))


@dataclass(frozen=True)
class SynthConfig:
    n_securities: int = 1
    n_days: int = 250
    start: dt.date = dt.date(2004, 1, 1)
    planted_pairs: Sequence[PlantedPair] = ()
    activity: float | Sequence[float] = 4.0
    trade_prob: float | Sequence[float] = 1.0
    volume_scale: float = 1000.0
    seed: int = 0
    security_prefix: str = "SEC"

    def __post_init__(self):
        keys = [p.key for p in self.planted_pairs]
        if len(set(keys)) != len(keys):
            raise ValueError("planted pairs must be distinct")
        act = np.broadcast_to(np.asarray(self.activity, float), (len(CATEGORIES),))
        if np.any(act < 1.0):
            raise ValueError("activity is the mean number of trades per active day, must be >= 1")
        tp = np.broadcast_to(np.asarray(self.trade_prob, float), (len(CATEGORIES),))
        if np.any((tp <= 0) | (tp > 1)):
            raise ValueError("trade probabilities must lie in (0, 1]")
        if self.n_days < 2 or self.n_securities < 1:
            raise ValueError("need at least 2 days and 1 security")

    @property
    def securities(self) -> list[str]:
        return [f"{self.security_prefix}{s:03d}" for s in range(self.n_securities)]


def business_days(start: dt.date, n: int) -> np.ndarray:
    first = np.busday_offset(np.datetime64(start, "D"), 0, roll="forward")
    return np.busday_offset(first, np.arange(n), roll="forward")


def _latent(cfg: SynthConfig, s: int, days: np.ndarray, rng) -> np.ndarray:
    z = rng.standard_normal((len(days), len(CATEGORIES)))
    for pair in cfg.planted_pairs:
        if pair.securities is not None and s not in pair.securities:
            continue
        on = np.ones(len(days), bool)
        if pair.windows is not None:
            on[:] = False
            for lo, hi in pair.windows:
                on |= (days >= np.datetime64(lo, "D")) & (days < np.datetime64(hi, "D"))
        a, b = pair.a.index, pair.b.index
        noise = rng.standard_normal(len(days))
        coupled = pair.rho * z[:, a] + np.sqrt(1 - pair.rho ** 2) * noise
        z[on, b] = coupled[on]
    v = np.rint(cfg.volume_scale * z).astype(np.int64)
    tp = np.broadcast_to(np.asarray(cfg.trade_prob, float), (len(CATEGORIES),))
    if np.any(tp < 1):
        v[rng.random(v.shape) >= tp] = 0
    return v


def _split(v: int, k: int, rng) -> list[int]:
    """Split v into at most k nonzero trades of v's sign, summing to v."""
    size = abs(v)
    k = min(k, size)
    if k == 1:
        return [v]
    cuts = np.sort(rng.choice(np.arange(1, size), size=k - 1, replace=False))
    parts = np.diff(np.concatenate(([0], cuts, [size])))
    return (np.sign(v) * parts).tolist()


def _investor(cat: CategoryId, day: np.datetime64, rng) -> tuple[int, int, int, str]:
    sector = cat.group.sector
    birth = 0
    if sector is Sector.HOUSEHOLD:
        lo, hi = next((lo, hi) for g, lo, hi in AGE_BOUNDS if g is cat.group)
        hi = _RETIRED_MAX_AGE if hi == float("inf") else int(hi)
        age = int(rng.integers(lo + 1, hi + 1))
        birth = day.astype(object).year - age
    k = int(rng.integers(0, 20))
    inv = f"{sector.value}{cat.index:02d}-{birth}-{k:02d}"
    return _SECTORS.index(sector), birth, _REGIONS.index(cat.region), inv


def generate_with_latent(config: SynthConfig):
    """Transactions plus, per security, the latent net-volume matrix they sum to."""
    days = business_days(config.start, config.n_days)
    act = np.broadcast_to(np.asarray(config.activity, float), (len(CATEGORIES),))
    cols = {k: [] for k in ("dates", "category", "volume", "sector", "birth_year",
                            "region", "investor", "security")}
    latent = {}
    for s, sec in enumerate(config.securities):
        rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(s,)))
        v = _latent(config, s, days, rng)
        latent[sec] = NetVolumeMatrix(days, v)
        for t, c in zip(*np.nonzero(v != 0)):
            # days with zero net volume carry no trades
            k = 1 + int(rng.poisson(act[c] - 1.0))
            cat = CATEGORIES[c]
            for part in _split(int(v[t, c]), k, rng):
                sector, birth, region, inv = _investor(cat, days[t], rng)
                cols["dates"].append(days[t])
                cols["category"].append(c)
                cols["volume"].append(part)
                cols["sector"].append(sector)
                cols["birth_year"].append(birth)
                cols["region"].append(region)
                cols["investor"].append(inv)
                cols["security"].append(sec)
    return TransactionTable(**cols), latent


def generate(config: SynthConfig) -> TransactionTable:
    return generate_with_latent(config)[0]


def planted_edges(config: SynthConfig) -> frozenset:
    return frozenset(p.key for p in config.planted_pairs)


def default_planted_pairs(n_pairs: int = 20, rho_min: float = 0.6, rho_max: float = 0.9,
                          seed: int = 0) -> list[PlantedPair]:
    """Disjoint random pairs over the universe with |rho| in [rho_min, rho_max]."""
    rng = np.random.default_rng(seed)
    if 2 * n_pairs > len(CATEGORIES):
        raise ValueError("too many disjoint pairs for the universe")
    idx = rng.permutation(len(CATEGORIES))[: 2 * n_pairs]
    rhos = rng.uniform(rho_min, rho_max, n_pairs) * rng.choice((-1, 1), n_pairs)
    return [PlantedPair(CATEGORIES[idx[2 * k]], CATEGORIES[idx[2 * k + 1]], float(rhos[k]))
            for k in range(n_pairs)]
