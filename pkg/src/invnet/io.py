"""Transaction CSV ingestion and network/report serialization.

Transaction CSV columns::

    trade_date,investor_id,sector_code,birth_year,postal_code,security_id,signed_volume[,gender]

``birth_year`` is empty for non-households; ``gender`` is accepted and ignored.
Postal codes are mapped to regions through a ``postal_code,region`` CSV.
"""
from __future__ import annotations

import csv
import datetime as dt
import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .analysis import Centrality, OccurrenceTable, OverlapReport
from .categorization import CategorizationError, assign_category
from .model import (CATEGORIES, AggregationReport, BinaryNetwork, CategoryId, Group, Region,
                    Sector, TransactionTable, WeightedCountNetwork)

TX_COLUMNS = ("trade_date", "investor_id", "sector_code", "birth_year", "postal_code",
              "security_id", "signed_volume")
_SECTORS = tuple(Sector)
_REGIONS = tuple(Region)


# -- ingestion ---------------------------------------------------------------

def read_postal_map(path) -> dict[str, Region]:
    with open(path, newline="") as fh:
        rows = csv.DictReader(fh)
        try:
            return {r["postal_code"].strip(): Region(r["region"].strip()) for r in rows}
        except (KeyError, ValueError) as exc:
            raise ValueError(f"bad postal map {path}: {exc}") from exc


def write_postal_map(path, mapping: dict[str, Region]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("postal_code", "region"))
        for code in sorted(mapping):
            w.writerow((code, mapping[code].value))


@dataclass
class Reject:
    line: int
    reason: str
    detail: str


@dataclass
class IngestResult:
    transactions: TransactionTable
    rejects: list[Reject] = field(default_factory=list)
    n_rows: int = 0

    @property
    def reject_rate(self) -> float:
        return len(self.rejects) / self.n_rows if self.n_rows else 0.0

    def summary(self) -> dict:
        tx = self.transactions
        cats = Counter(tx.category.tolist())
        return {
            "rows": self.n_rows,
            "accepted": len(tx),
            "rejected": len(self.rejects),
            "date_range": [str(tx.dates.min()), str(tx.dates.max())] if len(tx) else None,
            "per_category": {str(CATEGORIES[c]): n for c, n in sorted(cats.items())},
            "securities": security_ranking(tx),
        }


def security_ranking(tx: TransactionTable) -> list[dict]:
    """Securities ranked by distinct investors, then transactions, then id."""
    rows = []
    for sec in tx.securities:
        mask = tx.security == sec
        rows.append({"security_id": sec,
                     "investors": len(set(tx.investor[mask].tolist())),
                     "transactions": int(mask.sum())})
    rows.sort(key=lambda r: (-r["investors"], -r["transactions"], r["security_id"]))
    return rows


def _parse_row(row: dict, postal: dict[str, Region], period):
    try:
        d = dt.date.fromisoformat(row["trade_date"].strip())
    except (ValueError, AttributeError):
        return "date", f"bad trade_date {row.get('trade_date')!r}"
    if period is not None and not (period[0] <= d < period[1]):
        return "date", f"{d} outside the declared period"
    try:
        sector = Sector(row["sector_code"].strip())
    except (ValueError, AttributeError):
        return "sector", f"unknown sector code {row.get('sector_code')!r}"
    by_raw = (row.get("birth_year") or "").strip()
    if sector is Sector.HOUSEHOLD:
        if not by_raw:
            return "birth_year", "household without birth year"
        try:
            birth = int(by_raw)
        except ValueError:
            return "birth_year", f"bad birth year {by_raw!r}"
    else:
        if by_raw:
            return "birth_year", "birth year given for a non-household"
        birth = None
    code = (row.get("postal_code") or "").strip()
    if code not in postal:
        return "postal", f"unmapped postal code {code!r}"
    region = postal[code]
    try:
        vol = int((row.get("signed_volume") or "").strip())
    except ValueError:
        return "volume", f"bad volume {row.get('signed_volume')!r}"
    if vol == 0:
        return "volume", "zero volume"
    inv = (row.get("investor_id") or "").strip()
    sec = (row.get("security_id") or "").strip()
    if not inv or not sec:
        return "format", "missing investor_id or security_id"
    try:
        cat = assign_category(_Meta(sector, birth, region, inv), d)
    except CategorizationError as exc:
        return "age", str(exc)
    return None, (d, cat.index, vol, _SECTORS.index(sector), birth or 0,
                  _REGIONS.index(region), inv, sec)


@dataclass(frozen=True)
class _Meta:
    sector: Sector
    birth_year: int | None
    region: Region
    investor_id: str


def ingest(path, postal_map, period: tuple[dt.date, dt.date] | None = None) -> IngestResult:
    """Parse and validate a transaction CSV.

    ``postal_map`` is a path or an already loaded mapping. Invalid rows are
    collected as rejects with their 1-based file line numbers.
    """
    postal = postal_map if isinstance(postal_map, dict) else read_postal_map(postal_map)
    good, rejects, n = [], [], 0
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(TX_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        for n, row in enumerate(reader, start=1):
            reason, out = _parse_row(row, postal, period)
            if reason:
                rejects.append(Reject(reader.line_num, reason, out))
            else:
                good.append(out)
    cols = list(zip(*good)) if good else [[]] * 8
    return IngestResult(TransactionTable(*cols), rejects, n)


def write_rejects(path, rejects: Iterable[Reject]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("line", "reason", "detail"))
        for r in rejects:
            w.writerow((r.line, r.reason, r.detail))


def write_transactions(path, tx: TransactionTable, gender_seed: int | None = 0) -> None:
    """Write transactions in the ingest format.

    Postal codes are the first synthetic code of each region; a random
    gender column is added unless ``gender_seed`` is None.
    """
    from .synth import synthetic_postal_codes

    codes = [synthetic_postal_codes(r)[0] for r in _REGIONS]
    rng = np.random.default_rng(gender_seed) if gender_seed is not None else None
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TX_COLUMNS + (("gender",) if rng is not None else ()))
        for k in range(len(tx)):
            by = int(tx.birth_year[k])
            row = [str(tx.dates[k]), tx.investor[k], _SECTORS[tx.sector[k]].value,
                   str(by) if by else "", codes[tx.region[k]], tx.security[k],
                   int(tx.volume[k])]
            if rng is not None:
                row.append("MF"[int(rng.integers(0, 2))])
            w.writerow(row)


# -- JSON --------------------------------------------------------------------

def _jsonable(v):
    if isinstance(v, dict) or hasattr(v, "items"):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, frozenset, set)):
        items = sorted(v) if isinstance(v, (frozenset, set)) else v
        return [_jsonable(x) for x in items]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, (dt.date, np.datetime64, CategoryId)):
        return str(v)
    return v


def dumps(obj) -> str:
    """Stable JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(_jsonable(obj), sort_keys=True, indent=1, allow_nan=False) + "\n"


def network_to_dict(g: BinaryNetwork) -> dict:
    return {
        "nodes": [str(n) for n in g.nodes],
        "edges": [list(e) for e in g.edge_labels()],
        "metadata": dict(g.metadata),
    }


def network_from_dict(d: dict) -> BinaryNetwork:
    labels = d["nodes"]
    nodes = CATEGORIES if labels == [str(c) for c in CATEGORIES] else tuple(labels)
    return BinaryNetwork.from_labels([tuple(e) for e in d["edges"]], nodes,
                                     **d.get("metadata", {}))


def counts_to_dict(c: WeightedCountNetwork) -> dict:
    i, j = np.nonzero(np.triu(c.counts, 1))
    return {
        "ensemble_size": c.ensemble_size,
        "entries": [[str(c.nodes[a]), str(c.nodes[b]), int(c.counts[a, b])]
                    for a, b in zip(i.tolist(), j.tolist())],
    }


def report_to_dict(r: AggregationReport) -> dict:
    return {
        "p_hat": r.p_hat,
        "n_tests": r.n_tests,
        "alpha": r.alpha,
        "alpha_adjusted": r.alpha_adjusted,
        "threshold": r.threshold,
        "degenerate": r.degenerate,
        "tail": "at_least" if r.inclusive else "exceeds",
        "network": network_to_dict(r.result),
        "counts": counts_to_dict(r.counts),
    }


def load_networks(path) -> list[BinaryNetwork]:
    """Networks from a network JSON, an ensemble JSON or a report JSON."""
    d = json.loads(Path(path).read_text())
    if "networks" in d:
        return [network_from_dict(x) for x in d["networks"]]
    if "network" in d:
        return [network_from_dict(d["network"])]
    return [network_from_dict(d)]


def ensemble_to_dict(ensemble: Sequence[BinaryNetwork], **metadata) -> dict:
    return {"metadata": metadata, "networks": [network_to_dict(g) for g in ensemble]}


# -- tabular and graph formats -------------------------------------------------

SECTOR_CLASSES = {
    "Households": "#c686e9",
    "Non-profit organizations": "#ea8615",
    "Other companies": "#8c8c8c",
    "Financial and insurance companies": "#00caff",
    "Government institutions": "#2e7d32",
}
_GROUP_CLASS = {
    Group.NON_PROFIT: "Non-profit organizations",
    Group.NON_FINANCIAL: "Other companies",
    Group.FINANCIAL_INSURANCE: "Financial and insurance companies",
    Group.GOVERNMENT: "Government institutions",
}


def sector_class(node) -> str:
    if isinstance(node, CategoryId):
        return _GROUP_CLASS.get(node.group, "Households")
    try:
        return sector_class(CategoryId.parse(str(node)))
    except ValueError:
        return "Other companies"


def csv_text(header, rows) -> str:
    import io as _io

    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def edges_csv(g: BinaryNetwork) -> str:
    return csv_text(("source", "target"), g.edge_labels())


def dot(g: BinaryNetwork, name: str = "investors") -> str:
    """Graphviz text; linked nodes only, filled by sector class."""
    def q(s):
        return '"' + str(s).replace('"', r'\"') + '"'

    lines = [f"graph {q(name)} {{", "  node [style=filled];"]
    for cls, color in SECTOR_CLASSES.items():
        lines.append(f"  // {cls}: {color}")
    for k in sorted(g.active_nodes()):
        node = g.nodes[k]
        cls = sector_class(node)
        lines.append(f"  {q(node)} [class={q(cls)}, fillcolor={q(SECTOR_CLASSES[cls])}];")
    for a, b in g.edge_labels():
        lines.append(f"  {q(a)} -- {q(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def occurrence_csv(t: OccurrenceTable) -> str:
    rows = [(a, b, c, *(int(x) for x in row))
            for (a, b), c, row in zip(t.edges, t.counts, t.presence)]
    return csv_text(("source", "target", "count", *t.members), rows)


def comparison_csv(reports: Sequence[tuple[str, OverlapReport]]) -> str:
    fields = list(OverlapReport.__dataclass_fields__)
    rows = [(label, *(_fmt(getattr(r, f)) for f in fields)) for label, r in reports]
    return csv_text(("label", *fields), rows)


def centrality_csv(rows: Sequence[Centrality]) -> str:
    return csv_text(Centrality._fields, [(r.node, *(_fmt(x) for x in r[1:])) for r in rows])


def _fmt(x):
    return f"{x:.6g}" if isinstance(x, float) else x


EXPORT_FORMATS = ("edges", "json", "dot", "occurrence", "comparison")


def export(obj, fmt: str, path=None, **options) -> str:
    """Serialize a network, report, occurrence table or comparison rows.

    Returns the text and writes it to ``path`` when given.
    """
    if fmt not in EXPORT_FORMATS:
        raise ValueError(f"unknown export format {fmt!r}; choose from {EXPORT_FORMATS}")
    if fmt == "occurrence":
        if not isinstance(obj, OccurrenceTable):
            raise TypeError("occurrence export needs an OccurrenceTable")
        text = occurrence_csv(obj)
    elif fmt == "comparison":
        text = comparison_csv(obj)
    else:
        g = obj.result if isinstance(obj, AggregationReport) else obj
        if fmt == "edges":
            text = edges_csv(g)
        elif fmt == "dot":
            text = dot(g, **options)
        else:
            text = dumps(report_to_dict(obj) if isinstance(obj, AggregationReport)
                         else network_to_dict(g))
    if path is not None:
        Path(path).write_text(text)
    return text
