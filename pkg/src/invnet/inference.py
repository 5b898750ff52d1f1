"""Binary network inference from MI matrices (C3NET, MST) and bootstrap ensembles."""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .mi import MIN_ACTIVE_DAYS, mi_matrix, null_mi_distribution, significance_mask
from .model import BinaryNetwork, MIMatrix, as_table
from .netvolume import bootstrap_resample, build_net_volume, replica_seed, trading_calendar

log = logging.getLogger(__name__)

METHODS = ("c3net", "mst")


def c3net(mi: MIMatrix, mask) -> BinaryNetwork:
    """Keep, for every node, its single strongest significant MI link.

    Ties go to the partner earliest in node order.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != mi.values.shape:
        raise ValueError("mask and MI matrix are not conformable")
    mask = mask & ~np.isnan(mi.values)
    np.fill_diagonal(mask, False)
    score = np.where(mask, mi.values, -np.inf)
    has = mask.any(axis=1)
    best = np.argmax(score, axis=1)
    edges = {(i, int(best[i])) for i in np.flatnonzero(has)}
    return BinaryNetwork(frozenset(edges), mi.nodes, {"method": "c3net"})


class _DisjointSet:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def mst(mi: MIMatrix) -> BinaryNetwork:
    """Kruskal tree over weights -MI on the eligible nodes.

    Pairs are scanned by ascending -MI, ties by (i, j). If the available
    pairs do not connect the eligible nodes, the spanning forest is returned
    with ``metadata["spanning"] = False``.
    """
    v = mi.values
    n = len(mi.nodes)
    i, j = np.triu_indices(n, 1)
    w = v[i, j]
    keep = ~np.isnan(w)
    i, j, w = i[keep], j[keep], w[keep]
    order = np.lexsort((j, i, -w))
    target = max(mi.n_eligible - 1, 0)
    ds = _DisjointSet(n)
    edges = []
    for k in order:
        if len(edges) == target:
            break
        a, b = int(i[k]), int(j[k])
        if ds.union(a, b):
            edges.append((a, b))
    spanning = len(edges) == target
    if not spanning:
        log.warning("MI pairs do not connect the %d eligible nodes; returning a forest "
                    "with %d edges", mi.n_eligible, len(edges))
    return BinaryNetwork(frozenset(edges), mi.nodes, {"method": "mst", "spanning": spanning})


def _infer_one(tx, calendar, method, alpha_mi, null, null_replicas, null_seed,
               min_active_days) -> BinaryNetwork:
    m = build_net_volume(tx, calendar)
    try:
        mi = mi_matrix(m, min_active_days)
    except ValueError as exc:
        log.warning("no network inferred: %s", exc)
        return BinaryNetwork(frozenset(), m.categories,
                             {"method": method, "eligible": (), "empty_reason": str(exc)})
    eligible = tuple(np.flatnonzero(mi.eligible).tolist())
    if method == "mst":
        g = mst(mi)
    else:
        if null is None:
            null = null_mi_distribution(tx, null_replicas, calendar, null_seed, min_active_days)
        mask = significance_mask(mi, null, alpha_mi) if len(null) else np.zeros_like(mi.eligible)
        g = c3net(mi, mask)
    return g.with_metadata(eligible=eligible)


def _replica(args) -> BinaryNetwork:
    tx, calendar, b, method, alpha_mi, null, R, seed, min_active_days = args
    ss = replica_seed(seed, b)
    tb = bootstrap_resample(tx, ss)
    g = _infer_one(tb, calendar, method, alpha_mi, null, R, ss, min_active_days)
    return g.with_metadata(replica=b, seed=int(seed))


def infer_network(transactions, calendar=None, method: str = "c3net", alpha_mi: float = 0.01,
                  null_replicas: int = 100, seed: int = 0,
                  min_active_days: int = MIN_ACTIVE_DAYS) -> BinaryNetwork:
    """Single inference on the data as given, without bootstrapping."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    tx = as_table(transactions)
    cal = trading_calendar(tx) if calendar is None else calendar
    g = _infer_one(tx, cal, method, alpha_mi, None, null_replicas,
                   np.random.SeedSequence(int(seed)), min_active_days)
    return g.with_metadata(replica=None, seed=int(seed))


def infer_bootstrap_ensemble(transactions, calendar=None, n_boot: int = 100,
                             method: str = "c3net", alpha_mi: float = 0.01,
                             null_replicas: int = 100, seed: int = 0,
                             null_scope: str = "replica",
                             min_active_days: int = MIN_ACTIVE_DAYS,
                             workers: int = 1) -> list[BinaryNetwork]:
    """Infer one network per bootstrap replica.

    ``n_boot=0`` returns the single network inferred from the unresampled
    data. ``null_scope="replica"`` rebuilds the C3NET null distribution from
    every bootstrap replica; ``"shared"`` builds it once from the original
    transactions and reuses it.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if n_boot < 0:
        raise ValueError("number of bootstrap replicas must be >= 0")
    if null_scope not in ("replica", "shared"):
        raise ValueError(f"unknown null scope {null_scope!r}")
    tx = as_table(transactions)
    cal = trading_calendar(tx) if calendar is None else np.asarray(calendar, "datetime64[D]")
    if n_boot == 0:
        return [infer_network(tx, cal, method, alpha_mi, null_replicas, seed, min_active_days)]

    null = None
    if method == "c3net" and null_scope == "shared":
        null = null_mi_distribution(tx, null_replicas, cal, np.random.SeedSequence(int(seed)),
                                    min_active_days)
    jobs = [(tx, cal, b, method, alpha_mi, null, null_replicas, seed, min_active_days)
            for b in range(n_boot)]
    if workers > 1 and n_boot > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_replica, jobs))
    return [_replica(j) for j in jobs]
