"""Network comparison, centrality and occurrence tables."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import networkx as nx
import numpy as np
from scipy.stats import spearmanr

from .aggregation import ensemble_counts
from .model import BinaryNetwork


def jaccard(a: frozenset, b: frozenset) -> float:
    union = len(a | b)
    return len(a & b) / union if union else 1.0


@dataclass(frozen=True)
class OverlapReport:
    nodes_a_only: int
    nodes_both: int
    nodes_b_only: int
    node_jaccard: float
    links_a_only: int
    links_both: int
    links_b_only: int
    link_jaccard: float
    degree_spearman: float

    def as_row(self) -> dict:
        return dict(self.__dict__)


def degree_spearman(a: BinaryNetwork, b: BinaryNetwork) -> float:
    """Spearman correlation of the two degree sequences over the full universe.

    NaN when either sequence is constant and the two differ.
    """
    da, db = a.degree(), b.degree()
    if np.array_equal(da, db):
        return 1.0
    if np.ptp(da) == 0 or np.ptp(db) == 0:
        return float("nan")
    return float(spearmanr(da, db)[0])


def compare_networks(a: BinaryNetwork, b: BinaryNetwork) -> OverlapReport:
    """Node and link overlap; nodes count only when they have a link."""
    if a.nodes != b.nodes:
        raise ValueError("networks use different node universes")
    na, nb = a.active_nodes(), b.active_nodes()
    ea, eb = a.edges, b.edges
    return OverlapReport(
        len(na - nb), len(na & nb), len(nb - na), jaccard(na, nb),
        len(ea - eb), len(ea & eb), len(eb - ea), jaccard(ea, eb),
        degree_spearman(a, b),
    )


class Centrality(NamedTuple):
    node: str
    degree: float
    load: float
    closeness: float


def to_networkx(g: BinaryNetwork, active_only: bool = False) -> nx.Graph:
    G = nx.Graph()
    idx = sorted(g.active_nodes()) if active_only else range(g.n_nodes)
    G.add_nodes_from(idx)
    G.add_edges_from(g.sorted_edges())
    return G


def centrality_report(g: BinaryNetwork) -> list[Centrality]:
    """Degree, load and closeness for every node in the universe.

    Measures are computed on the subgraph of active nodes. Degree is
    normalised by (active nodes - 1); closeness is the inverse mean distance
    to the nodes reachable in the same component. Nodes without links get
    zeros.
    """
    G = to_networkx(g, active_only=True)
    n_active = G.number_of_nodes()
    deg = dict(G.degree())
    load = nx.load_centrality(G, normalized=True) if n_active > 2 else {}
    close = nx.closeness_centrality(G, wf_improved=False)
    out = []
    for k, label in enumerate(g.nodes):
        if k not in deg:
            out.append(Centrality(str(label), 0.0, 0.0, 0.0))
            continue
        out.append(Centrality(str(label), deg[k] / (n_active - 1),
                              float(load.get(k, 0.0)), float(close[k])))
    return out


@dataclass(frozen=True)
class OccurrenceTable:
    """Presence of the most frequent edges across ensemble members.

    ``presence[r, k]`` tells whether edge ``edges[r]`` occurs in member ``k``.
    """

    edges: tuple
    counts: tuple
    presence: np.ndarray
    members: tuple


def occurrence_matrix(ensemble: Sequence[BinaryNetwork], top_k: int,
                      members: Sequence[str] | None = None) -> OccurrenceTable:
    """Top ``top_k`` edges by occurrence, ties broken by node order."""
    counts = ensemble_counts(ensemble).counts
    i, j = np.nonzero(np.triu(counts, 1))
    c = counts[i, j]
    order = np.lexsort((j, i, -c))[:max(top_k, 0)]
    edges = [(int(i[k]), int(j[k])) for k in order]
    presence = np.array([[e in g.edges for g in ensemble] for e in edges],
                        dtype=bool).reshape(len(edges), len(ensemble))
    nodes = ensemble[0].nodes
    labels = tuple((str(nodes[a]), str(nodes[b])) for a, b in edges)
    if members is None:
        members = [str(k + 1) for k in range(len(ensemble))]
    return OccurrenceTable(labels, tuple(int(counts[e]) for e in edges), presence,
                           tuple(members))
