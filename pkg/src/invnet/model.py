"""Domain types shared across the package.

Everything here is immutable after construction. Node identities are
integer positions into a node universe (by default the 99 investor
categories), which keeps edge sets cheap to hash and sort.
"""
from __future__ import annotations

import datetime as dt
import functools
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Any, Iterable, Iterator, Mapping, Sequence

import numpy as np


class Sector(Enum):
    HOUSEHOLD = "HH"
    NON_FINANCIAL = "NF"
    FINANCIAL_INSURANCE = "FI"
    GOVERNMENT = "GG"
    NON_PROFIT = "NP"


class Region(Enum):
    HELSINKI = "Helsinki"
    REST_UUSIMAA = "Rest-Uusimaa"
    EASTERN_TAVASTIA = "Eastern-Tavastia"
    SOUTH_WEST = "South-West"
    WESTERN_TAVASTIA = "Western-Tavastia"
    CENTRAL_FINLAND = "Central-Finland"
    SOUTH_EAST = "South-East"
    OSTROBOTHNIA = "Ostrobothnia"
    NORTHERN_SAVONIA = "Northern-Savonia"
    EASTERN_FINLAND = "Eastern-Finland"
    NORTHERN_FINLAND = "Northern-Finland"


class Group(Enum):
    """The nine sector-or-age groups; declaration order is the node order."""

    FINANCIAL_INSURANCE = "FinancialInsurance"
    GOVERNMENT = "Government"
    NON_FINANCIAL = "NonFinancial"
    NON_PROFIT = "NonProfit"
    UNDER_AGED = "Under-Aged"
    YOUNG = "Young"
    MIDDLE_AGED = "Middle-Aged"
    MATURE = "Mature"
    RETIRED = "Retired"

    @property
    def is_household(self) -> bool:
        return self in _AGE_GROUPS

    @property
    def sector(self) -> Sector:
        if self.is_household:
            return Sector.HOUSEHOLD
        return _GROUP_SECTOR[self]


# Upper bounds of the half-open age intervals (lo, hi]; the last one is open.
AGE_BOUNDS: tuple[tuple[Group, int, float], ...] = (
    (Group.UNDER_AGED, 0, 18),
    (Group.YOUNG, 18, 30),
    (Group.MIDDLE_AGED, 30, 50),
    (Group.MATURE, 50, 64),
    (Group.RETIRED, 64, float("inf")),
)
_AGE_GROUPS = frozenset(g for g, _, _ in AGE_BOUNDS)
_GROUP_SECTOR = {
    Group.FINANCIAL_INSURANCE: Sector.FINANCIAL_INSURANCE,
    Group.GOVERNMENT: Sector.GOVERNMENT,
    Group.NON_FINANCIAL: Sector.NON_FINANCIAL,
    Group.NON_PROFIT: Sector.NON_PROFIT,
}
SECTOR_GROUP = {s: g for g, s in _GROUP_SECTOR.items()}

_GROUPS = tuple(Group)
_REGIONS = tuple(Region)
_GROUP_RANK = {g: i for i, g in enumerate(_GROUPS)}
_REGION_RANK = {r: i for i, r in enumerate(_REGIONS)}
N_CATEGORIES = len(_GROUPS) * len(_REGIONS)


@functools.total_ordering
@dataclass(frozen=True)
class CategoryId:
    """Investor category: (sector or age group) x region."""

    group: Group
    region: Region

    @property
    def index(self) -> int:
        return _GROUP_RANK[self.group] * len(_REGIONS) + _REGION_RANK[self.region]

    @classmethod
    def from_index(cls, index: int) -> "CategoryId":
        if not 0 <= index < N_CATEGORIES:
            raise ValueError(f"category index out of range: {index}")
        g, r = divmod(index, len(_REGIONS))
        return cls(_GROUPS[g], _REGIONS[r])

    @classmethod
    def parse(cls, label: str) -> "CategoryId":
        try:
            g, r = label.split("|")
            return cls(Group(g), Region(r))
        except ValueError as exc:
            raise ValueError(f"not a category label: {label!r}") from exc

    def __lt__(self, other: "CategoryId") -> bool:
        if not isinstance(other, CategoryId):
            return NotImplemented
        return self.index < other.index

    def __str__(self) -> str:
        return f"{self.group.value}|{self.region.value}"


CATEGORIES: tuple[CategoryId, ...] = tuple(
    CategoryId.from_index(i) for i in range(N_CATEGORIES)
)


@dataclass(frozen=True)
class Transaction:
    """One signed trade. Positive volume is a buy, negative a sell."""

    trade_date: dt.date
    investor_id: str
    sector: Sector
    birth_year: int | None
    region: Region
    security_id: str
    signed_volume: int

    def __post_init__(self):
        if self.signed_volume == 0:
            raise ValueError(f"zero volume in transaction of {self.investor_id}")
        if (self.birth_year is not None) != (self.sector is Sector.HOUSEHOLD):
            raise ValueError(
                f"birth_year must be given exactly for households ({self.investor_id})"
            )


class TransactionTable(Sequence[Transaction]):
    """Columnar, read-only store of transactions with resolved categories.

    Behaves as a sequence of :class:`Transaction`, but the numeric columns
    are what the resampling and net-volume code operate on.
    """

    __slots__ = ("dates", "category", "volume", "sector", "birth_year",
                 "region", "investor", "security")

    def __init__(self, dates, category, volume, sector, birth_year, region,
                 investor, security):
        cols = dict(
            dates=np.asarray(dates, dtype="datetime64[D]"),
            category=np.asarray(category, dtype=np.int16),
            volume=np.asarray(volume, dtype=np.int64),
            sector=np.asarray(sector, dtype=np.int8),
            birth_year=np.asarray(birth_year, dtype=np.int32),
            region=np.asarray(region, dtype=np.int8),
            investor=np.asarray(investor, dtype=object),
            security=np.asarray(security, dtype=object),
        )
        n = {len(v) for v in cols.values()}
        if len(n) > 1:
            raise ValueError("transaction columns differ in length")
        for k, v in cols.items():
            v.setflags(write=False)
            object.__setattr__(self, k, v)

    def __setattr__(self, key, value):
        raise AttributeError("TransactionTable is immutable")

    def __reduce__(self):
        return TransactionTable, tuple(getattr(self, k) for k in self.__slots__)

    @classmethod
    def from_transactions(cls, transactions: Iterable[Transaction]) -> "TransactionTable":
        from .categorization import assign_category

        rows = list(transactions)
        sectors = tuple(Sector)
        return cls(
            dates=[t.trade_date for t in rows],
            category=[assign_category(t, t.trade_date).index for t in rows],
            volume=[t.signed_volume for t in rows],
            sector=[sectors.index(t.sector) for t in rows],
            birth_year=[t.birth_year or 0 for t in rows],
            region=[_REGION_RANK[t.region] for t in rows],
            investor=[t.investor_id for t in rows],
            security=[t.security_id for t in rows],
        )

    @classmethod
    def empty(cls) -> "TransactionTable":
        return cls([], [], [], [], [], [], [], [])

    def take(self, idx) -> "TransactionTable":
        idx = np.asarray(idx)
        return TransactionTable(*(getattr(self, k)[idx] for k in self.__slots__))

    def where(self, mask) -> "TransactionTable":
        return self.take(np.flatnonzero(mask))

    def for_security(self, security_id: str) -> "TransactionTable":
        return self.where(self.security == security_id)

    def __len__(self) -> int:
        return len(self.volume)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return self.take(np.arange(len(self))[i])
        by = int(self.birth_year[i])
        return Transaction(
            trade_date=self.dates[i].item(),
            investor_id=self.investor[i],
            sector=tuple(Sector)[self.sector[i]],
            birth_year=by or None,
            region=_REGIONS[self.region[i]],
            security_id=self.security[i],
            signed_volume=int(self.volume[i]),
        )

    def __iter__(self) -> Iterator[Transaction]:
        return (self[i] for i in range(len(self)))

    @property
    def securities(self) -> list[str]:
        return sorted(set(self.security.tolist()))


def as_table(transactions) -> TransactionTable:
    if isinstance(transactions, TransactionTable):
        return transactions
    return TransactionTable.from_transactions(transactions)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class NetVolumeMatrix:
    """Daily net traded volume per category, shape (days, categories)."""

    dates: np.ndarray
    values: np.ndarray
    categories: tuple = CATEGORIES

    def __post_init__(self):
        object.__setattr__(self, "dates", _frozen(np.asarray(self.dates, "datetime64[D]")))
        object.__setattr__(self, "values", _frozen(np.asarray(self.values, np.int64)))
        if self.values.shape != (len(self.dates), len(self.categories)):
            raise ValueError(f"shape {self.values.shape} does not match dates x categories")
        if len(self.dates) > 1 and not np.all(np.diff(self.dates) > np.timedelta64(0, "D")):
            raise ValueError("dates must be strictly increasing")


@dataclass(frozen=True)
class MIMatrix:
    """Pairwise mutual information in nats; NaN marks absent pairs."""

    values: np.ndarray
    eligible: np.ndarray
    saturated: np.ndarray
    nodes: tuple = CATEGORIES

    def __post_init__(self):
        for name in ("values", "eligible", "saturated"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    @property
    def n_eligible(self) -> int:
        return int(self.eligible.sum())

    def pair_values(self) -> np.ndarray:
        """MI over eligible pairs i < j, in row-major order."""
        iu = np.triu_indices(len(self.nodes), 1)
        v = self.values[iu]
        return v[~np.isnan(v)]


def _norm_edge(i: int, j: int) -> tuple[int, int]:
    i, j = int(i), int(j)
    if i == j:
        raise ValueError(f"self-loop on node {i}")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class BinaryNetwork:
    """Undirected simple graph over a fixed node universe.

    ``edges`` holds index pairs ``(i, j)`` with ``i < j``.
    """

    edges: frozenset = frozenset()
    nodes: tuple = CATEGORIES
    metadata: Mapping[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        n = len(self.nodes)
        edges = frozenset(_norm_edge(i, j) for i, j in self.edges)
        for i, j in edges:
            if j >= n or i < 0:
                raise ValueError(f"edge ({i}, {j}) outside a universe of {n} nodes")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "metadata", MappingProxyType(dict(self.metadata)))

    @classmethod
    def from_adjacency(cls, adj, nodes=CATEGORIES, **metadata) -> "BinaryNetwork":
        i, j = np.nonzero(np.triu(np.asarray(adj), 1))
        return cls(frozenset(zip(i.tolist(), j.tolist())), tuple(nodes), metadata)

    @classmethod
    def from_labels(cls, pairs, nodes=CATEGORIES, **metadata) -> "BinaryNetwork":
        pos = {str(n): k for k, n in enumerate(nodes)}
        edges = {(pos[str(a)], pos[str(b)]) for a, b in pairs}
        return cls(frozenset(edges), tuple(nodes), metadata)

    def __reduce__(self):
        return BinaryNetwork, (self.edges, self.nodes, dict(self.metadata))

    def with_metadata(self, **extra) -> "BinaryNetwork":
        return BinaryNetwork(self.edges, self.nodes, {**self.metadata, **extra})

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def __len__(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def edge_labels(self) -> list[tuple[str, str]]:
        return [(str(self.nodes[i]), str(self.nodes[j])) for i, j in self.sorted_edges()]

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n_nodes, self.n_nodes), dtype=bool)
        if self.edges:
            i, j = np.array(sorted(self.edges)).T
            a[i, j] = a[j, i] = True
        return a

    def degree(self) -> np.ndarray:
        d = np.zeros(self.n_nodes, dtype=np.int64)
        for i, j in self.edges:
            d[i] += 1
            d[j] += 1
        return d

    def active_nodes(self) -> frozenset:
        return frozenset(k for e in self.edges for k in e)


@dataclass(frozen=True)
class WeightedCountNetwork:
    """Edge occurrence counts over an ensemble of ``ensemble_size`` networks."""

    counts: np.ndarray
    ensemble_size: int
    nodes: tuple = CATEGORIES

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.shape != (len(self.nodes),) * 2:
            raise ValueError("count matrix does not match the node universe")
        if not np.array_equal(c, c.T) or np.any(np.diag(c)):
            raise ValueError("counts must be symmetric with a zero diagonal")
        if c.min(initial=0) < 0 or c.max(initial=0) > self.ensemble_size:
            raise ValueError("counts must lie in [0, ensemble_size]")
        object.__setattr__(self, "counts", _frozen(c))

    @property
    def total_edges(self) -> int:
        return int(np.triu(self.counts, 1).sum())

    @property
    def distinct_edges(self) -> int:
        return int(np.count_nonzero(np.triu(self.counts, 1)))


@dataclass(frozen=True)
class EnsembleGrid:
    """Networks indexed by ``[security][window]``."""

    networks: tuple
    securities: tuple
    windows: tuple
    window_months: int | None = None
    start: dt.date | None = None

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.networks)
        object.__setattr__(self, "networks", rows)
        if len(rows) != len(self.securities) or any(len(r) != len(self.windows) for r in rows):
            raise ValueError("grid shape does not match securities x windows")
        universes = {r.nodes for row in rows for r in row}
        if len(universes) > 1:
            raise ValueError("grid cells do not share a node universe")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.securities), len(self.windows)

    def row(self, s: int) -> list[BinaryNetwork]:
        return list(self.networks[s])

    def column(self, t: int) -> list[BinaryNetwork]:
        return [row[t] for row in self.networks]


@dataclass(frozen=True)
class AggregationReport:
    """Outcome of one statistically validated aggregation.

    ``threshold`` is None and ``degenerate`` is True when nothing in the
    ensemble can be tested (no edges at all).
    """

    p_hat: float
    n_tests: int
    alpha: float
    alpha_adjusted: float | None
    threshold: int | None
    result: BinaryNetwork
    counts: WeightedCountNetwork
    degenerate: bool = False
    inclusive: bool = False
