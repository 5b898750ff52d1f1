"""End-to-end security x window pipeline with a reproducibility manifest."""
from __future__ import annotations

import dataclasses
import datetime as dt
import hashlib
import json
import logging
import os
import re
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import io
from .aggregation import ORDERS, aggregate, aggregate_layers
from .inference import METHODS, infer_bootstrap_ensemble
from .model import BinaryNetwork, EnsembleGrid, TransactionTable
from .netvolume import month_windows, trading_calendar

log = logging.getLogger(__name__)

WINDOW_MONTHS = (1, 2, 3, 4, 6, 12, 24)
WORKERS_ENV = "INVNET_WORKERS"


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    """Pipeline parameters; serialized as flat ``key = value`` text."""

    input: str = ""
    postal_map: str = ""
    output: str = "invnet-out"
    securities: list = field(default_factory=list)
    start: dt.date | None = None
    end: dt.date | None = None
    window_months: int | None = None
    n_boot: int = 100
    method: str = "c3net"
    alpha: float = 0.01
    alpha_mi: float = 0.01
    null_replicas: int = 100
    null_scope: str = "replica"
    min_active_days: int = 5
    order: str = "ST"
    inclusive: bool = False
    seed: int = 0
    save_ensembles: bool = False

    def validate(self) -> "PipelineConfig":
        if self.window_months is not None and self.window_months not in WINDOW_MONTHS:
            raise ConfigError(f"window_months must be one of {WINDOW_MONTHS} or 'whole'")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}")
        if self.order not in ORDERS + ("none",):
            raise ConfigError("order must be ST, TS or none")
        if not 0 < self.alpha < 1 or not 0 < self.alpha_mi <= 1:
            raise ConfigError("significance levels must lie in (0, 1)")
        if self.n_boot < 0 or self.null_replicas < 1:
            raise ConfigError("n_boot must be >= 0 and null_replicas >= 1")
        if self.null_scope not in ("replica", "shared"):
            raise ConfigError("null_scope must be replica or shared")
        return self

    # -- text form --

    def to_text(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if f.name == "window_months" and v is None:
                v = "whole"
            elif isinstance(v, list):
                v = ",".join(v)
            elif v is None:
                v = ""
            elif isinstance(v, bool):
                v = str(v).lower()
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PipelineConfig":
        raw = {}
        for n, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            m = re.fullmatch(r"([A-Za-z_][\w-]*)\s*[=:]\s*(.*)", line)
            if not m:
                raise ConfigError(f"config line {n}: expected 'key = value'")
            raw[m.group(1).replace("-", "_")] = m.group(2).strip()
        return cls().update(raw)

    def update(self, raw: dict) -> "PipelineConfig":
        """Copy with string-valued overrides applied."""
        known = {f.name: f for f in dataclasses.fields(self)}
        vals = dataclasses.asdict(self)
        for key, text in raw.items():
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            vals[key] = _coerce(key, text, getattr(self, key))
        return PipelineConfig(**vals)


def _coerce(key, text, current):
    if not isinstance(text, str):
        return text
    try:
        if key in ("start", "end"):
            return dt.date.fromisoformat(text) if text else None
        if key == "window_months":
            return None if text in ("", "whole", "none") else int(text)
        if key == "securities":
            return [s.strip() for s in text.split(",") if s.strip()]
        if isinstance(current, bool):
            if text.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(text)
            return text.lower() in ("true", "1", "yes")
        if isinstance(current, int):
            return int(text)
        if isinstance(current, float):
            return float(text)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {text!r}") from exc
    return text


def cell_seed(seed: int, s: int, t: int) -> int:
    """Root seed of the bootstrap replicas of cell (security s, window t)."""
    return int(np.random.SeedSequence(int(seed), spawn_key=(s, t)).generate_state(1)[0])


def _window_label(lo: dt.date, hi: dt.date) -> str:
    return f"{lo.isoformat()}_{hi.isoformat()}"


def _cell_job(args):
    tx, sec, label, lo, hi, seed, cfg = args
    sub = tx.for_security(sec)
    sub = sub.where((sub.dates >= np.datetime64(lo)) & (sub.dates < np.datetime64(hi)))
    meta = {"security_id": sec, "window": label, "seed": seed, "method": cfg.method,
            "n_boot": cfg.n_boot}
    if not len(sub):
        log.warning("no transactions for %s in %s", sec, label)
        return BinaryNetwork(frozenset(), metadata={**meta, "empty_reason": "no transactions"}), None, None
    cal = trading_calendar(sub)
    ens = infer_bootstrap_ensemble(sub, cal, cfg.n_boot, cfg.method, cfg.alpha_mi,
                                   cfg.null_replicas, seed, cfg.null_scope,
                                   cfg.min_active_days)
    if cfg.n_boot == 0:
        return ens[0].with_metadata(**meta), None, None
    rep = aggregate(ens, cfg.alpha, cfg.inclusive, **meta)
    return rep.result, rep, ens if cfg.save_ensembles else None


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass
class PipelineResult:
    grid: EnsembleGrid
    cell_reports: dict
    final: BinaryNetwork | None
    final_report: object
    layer_reports: tuple
    manifest: dict
    degenerate: bool


def run_pipeline(config: PipelineConfig, transactions: TransactionTable | None = None,
                 workers: int | None = None, write: bool = True) -> PipelineResult:
    """Infer every (security, window) cell, aggregate the grid and write artifacts.

    Artifacts under ``config.output``: ``cells/*.json`` (one report or
    network per cell), ``layers/*.json``, ``final.json``, ``final_edges.csv``,
    ``final.dot`` and ``manifest.json``. Output contains no timestamps, so a
    rerun with the same inputs and config is byte-identical.
    """
    cfg = config.validate()
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    rejects = 0
    input_hash = None
    if transactions is None:
        if not cfg.input:
            raise ConfigError("no input transactions given")
        res = io.ingest(cfg.input, cfg.postal_map)
        transactions, rejects = res.transactions, len(res.rejects)
        input_hash = hashlib.sha256(Path(cfg.input).read_bytes()).hexdigest()
    tx = transactions
    if not len(tx):
        raise ConfigError("no valid transactions")
    secs = cfg.securities or tx.securities
    missing = set(secs) - set(tx.securities)
    if missing:
        raise ConfigError(f"securities not in the data: {sorted(missing)}")
    start = cfg.start or tx.dates.min().item()
    end = cfg.end or (tx.dates.max().item() + dt.timedelta(days=1))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        windows = month_windows(start, end, cfg.window_months)
    for w in caught:
        log.warning("%s", w.message)
    if not windows:
        raise ConfigError("period shorter than one window")
    labels = [_window_label(lo, hi) for lo, hi in windows]

    jobs = [(tx, sec, labels[t], lo, hi, cell_seed(cfg.seed, s, t), cfg)
            for s, sec in enumerate(secs) for t, (lo, hi) in enumerate(windows)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_cell_job, jobs))
    else:
        results = [_cell_job(j) for j in jobs]

    T = len(windows)
    cells = [[results[s * T + t][0] for t in range(T)] for s in range(len(secs))]
    grid = EnsembleGrid(cells, tuple(secs), tuple(labels), cfg.window_months, start)
    cell_reports = {(secs[s], labels[t]): results[s * T + t][1]
                    for s in range(len(secs)) for t in range(T)}

    layer_reports, final_report = (), None
    if cfg.order in ORDERS:
        ml = aggregate_layers(grid, cfg.order, cfg.alpha, cfg.inclusive)
        final, layer_reports, final_report = ml.network, ml.layer_reports, ml.final_report
    elif len(secs) == 1 and T == 1:
        final = cells[0][0]
        final_report = cell_reports[(secs[0], labels[0])]
    elif len(secs) == 1 or T == 1:
        flat = [g for row in cells for g in row]
        final_report = aggregate(flat, cfg.alpha, cfg.inclusive,
                                 layer="S" if T == 1 else "T")
        final = final_report.result
    else:
        raise ConfigError("order 'none' needs a single security or a single window")
    degenerate = bool(final_report is not None and final_report.degenerate)
    final = final.with_metadata(order=cfg.order, seed=cfg.seed)

    files = {}
    for s, sec in enumerate(secs):
        for t, label in enumerate(labels):
            rep = cell_reports[(sec, label)]
            body = io.report_to_dict(rep) if rep is not None else \
                {"network": io.network_to_dict(cells[s][t])}
            body["cell"] = {"security_id": sec, "window": label,
                            "seed": cell_seed(cfg.seed, s, t)}
            files[f"cells/{_safe(sec)}__{label}.json"] = io.dumps(body)
            ens = results[s * T + t][2]
            if ens is not None:
                files[f"ensembles/{_safe(sec)}__{label}.json"] = io.dumps(io.ensemble_to_dict(ens))
    for rep in layer_reports:
        key = rep.result.metadata.get("window") or rep.result.metadata.get("security")
        files[f"layers/{cfg.order}_{_safe(key)}.json"] = io.dumps(io.report_to_dict(rep))
    final_body = io.report_to_dict(final_report) if final_report is not None else \
        {"network": io.network_to_dict(final)}
    final_body["network"] = io.network_to_dict(final)
    files["final.json"] = io.dumps(final_body)
    files["final_edges.csv"] = io.edges_csv(final)
    files["final.dot"] = io.dot(final)

    manifest = {
        "version": __version__,
        # output location is not part of the result
        "config": dataclasses.replace(cfg, output="").to_text(),
        "input_sha256": input_hash,
        "rejected_rows": rejects,
        "n_transactions": len(tx),
        "securities": list(secs),
        "windows": labels,
        "cell_seeds": {f"{sec}__{labels[t]}": cell_seed(cfg.seed, s, t)
                       for s, sec in enumerate(secs) for t in range(T)},
        "artifacts": {k: _sha(v) for k, v in sorted(files.items())},
        "degenerate": degenerate,
    }
    manifest["manifest_hash"] = _sha(io.dumps(manifest))
    files["manifest.json"] = io.dumps(manifest)
    if write:
        out = Path(cfg.output)
        for rel, text in files.items():
            p = out / rel
            p.parent.mkdir(parents=True, exist_ok=True)
            p.write_text(text)
    return PipelineResult(grid, cell_reports, final, final_report, layer_reports,
                          manifest, degenerate)


def config_from_manifest(path) -> PipelineConfig:
    m = json.loads(Path(path).read_text())
    return PipelineConfig.from_text(m["config"])


def _safe(s) -> str:
    return re.sub(r"[^\w.-]+", "_", str(s))
