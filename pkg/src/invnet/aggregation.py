"""Statistically validated aggregation of network ensembles.

An ensemble of ``N`` binary networks is reduced to one network by counting
edge occurrences, modelling each count as Binomial(N, p) under an
Erdos-Renyi null with ``p`` estimated from the ensemble's edge density, and
keeping edges whose tail probability beats a Bonferroni-adjusted level.

Tail convention: by default an edge seen ``n`` times gets the p-value
``P(X > n)``, the probability of seeing it *more* often by chance. This is
the reading that reproduces the published thresholds (10, 5, 4, 16).
``inclusive=True`` switches to ``P(X >= n)``.

Bootstrap replicas share source data and are not strictly independent;
the binomial model is applied to them regardless.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import AggregationReport, BinaryNetwork, EnsembleGrid, WeightedCountNetwork


class DegenerateEnsemble(ValueError):
    """No threshold can make any edge significant."""


def ensemble_counts(ensemble: Sequence[BinaryNetwork]) -> WeightedCountNetwork:
    if not ensemble:
        raise ValueError("empty ensemble")
    nodes = ensemble[0].nodes
    n = len(nodes)
    counts = np.zeros((n, n), dtype=np.int64)
    for g in ensemble:
        if g.nodes != nodes:
            raise ValueError("ensemble members use different node universes")
        if g.edges:
            i, j = np.array(sorted(g.edges)).T
            counts[i, j] += 1
    counts += counts.T
    return WeightedCountNetwork(counts, len(ensemble), nodes)


def estimate_link_probability(counts: WeightedCountNetwork, n_nodes: int | None = None) -> float:
    """Fraction of ensemble edges among all ``N * M(M-1)/2`` possible ones."""
    m = len(counts.nodes) if n_nodes is None else n_nodes
    possible = counts.ensemble_size * m * (m - 1) // 2
    if possible == 0:
        return 0.0
    return counts.total_edges / possible


def binomial_tail(n_ij: int, n: int, p: float) -> float:
    """P(X >= n_ij) for X ~ Binomial(n, p), summed in log space."""
    if not 0 <= n_ij <= n:
        raise ValueError(f"count {n_ij} outside [0, {n}]")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    if n_ij == 0:
        return 1.0
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0
    lp, lq = math.log(p), math.log1p(-p)
    lgn = math.lgamma(n + 1)
    logs = [lgn - math.lgamma(k + 1) - math.lgamma(n - k + 1) + k * lp + (n - k) * lq
            for k in range(n_ij, n + 1)]
    top = max(logs)
    s = math.fsum(math.exp(t - top) for t in logs)
    return min(1.0, math.exp(top) * s)


def edge_pvalue(n_ij: int, n: int, p: float, inclusive: bool = False) -> float:
    """Chance probability of an edge seen ``n_ij`` times out of ``n``."""
    if inclusive:
        return binomial_tail(n_ij, n, p)
    return binomial_tail(n_ij + 1, n, p) if n_ij < n else 0.0


def occurrence_threshold(n: int, p: float, alpha_adjusted: float,
                         inclusive: bool = False) -> int:
    """Smallest occurrence count whose edge p-value is below ``alpha_adjusted``.

    Raises :class:`DegenerateEnsemble` when no count up to ``n`` qualifies.
    """
    if not 0.0 < alpha_adjusted < 1.0:
        raise ValueError("alpha_adjusted must lie in (0, 1)")
    for k in range(1, n + 1):
        if edge_pvalue(k, n, p, inclusive) < alpha_adjusted:
            return k
    raise DegenerateEnsemble(
        f"no occurrence count up to {n} is significant at {alpha_adjusted:g} (p={p:g})"
    )


def aggregate(ensemble: Sequence[BinaryNetwork], alpha: float = 0.01,
              inclusive: bool = False, **metadata) -> AggregationReport:
    """Aggregate an ensemble into one network of significantly recurring edges."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    counts = ensemble_counts(ensemble)
    n = counts.ensemble_size
    p_hat = estimate_link_probability(counts)
    n_tests = counts.distinct_edges
    meta = {"aggregated": n, **metadata}

    def empty(alpha_adj):
        return AggregationReport(p_hat, n_tests, alpha, alpha_adj, None,
                                 BinaryNetwork(frozenset(), counts.nodes, meta),
                                 counts, degenerate=True, inclusive=inclusive)

    if n_tests == 0:
        return empty(None)
    alpha_adj = alpha / n_tests
    try:
        n0 = occurrence_threshold(n, p_hat, alpha_adj, inclusive)
    except DegenerateEnsemble:
        return empty(alpha_adj)
    i, j = np.nonzero(np.triu(counts.counts >= n0, 1))
    result = BinaryNetwork(frozenset(zip(i.tolist(), j.tolist())), counts.nodes,
                           {**meta, "threshold": n0})
    return AggregationReport(p_hat, n_tests, alpha, alpha_adj, n0, result, counts,
                             degenerate=False, inclusive=inclusive)


ORDERS = ("ST", "TS")


@dataclass(frozen=True)
class MultilayerResult:
    """Final network of a two-level aggregation plus its intermediate layer.

    ``layer_reports`` are per window for ST and per security for TS.
    """

    order: str
    network: BinaryNetwork
    layer_reports: tuple
    final_report: AggregationReport


def aggregate_layers(grid: EnsembleGrid, order: str = "ST", alpha: float = 0.01,
                     inclusive: bool = False, workers: int = 1) -> MultilayerResult:
    """Two-level aggregation of a security x window grid.

    ST aggregates each window over securities, then the window networks.
    TS aggregates each security over windows, then the security networks.
    """
    if order not in ORDERS:
        raise ValueError(f"order must be one of {ORDERS}, got {order!r}")
    s_count, t_count = grid.shape
    if order == "ST":
        groups = [(grid.column(t), {"window": str(grid.windows[t])}) for t in range(t_count)]
    else:
        groups = [(grid.row(s), {"security": str(grid.securities[s])}) for s in range(s_count)]

    def run(item):
        members, meta = item
        return aggregate(members, alpha, inclusive, layer=order[0], **meta)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(run, groups))
    else:
        reports = [run(g) for g in groups]
    final = aggregate([r.result for r in reports], alpha, inclusive, layer=order)
    return MultilayerResult(order, final.result, tuple(reports), final)


def multilayer_aggregate(grid: EnsembleGrid, order: str = "ST", alpha: float = 0.01,
                         inclusive: bool = False) -> BinaryNetwork:
    return aggregate_layers(grid, order, alpha, inclusive).network
