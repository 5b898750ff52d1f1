"""Command line interface.

Exit codes: 0 success, 1 validation failure, 2 degenerate statistics.
The worker count for parallel stages comes from ``INVNET_WORKERS``.
"""
from __future__ import annotations

import argparse
import datetime as dt
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import io
from .aggregation import aggregate
from .analysis import centrality_report, compare_networks, occurrence_matrix
from .inference import METHODS, infer_bootstrap_ensemble
from .netvolume import trading_calendar
from .pipeline import (WORKERS_ENV, ConfigError, PipelineConfig, config_from_manifest,
                       run_pipeline)
from .synth import SYNTH_POSTAL_MAP, SynthConfig, default_planted_pairs, generate

EXIT_OK, EXIT_INVALID, EXIT_DEGENERATE = 0, 1, 2
log = logging.getLogger("invnet")


def _workers() -> int:
    return int(os.environ.get(WORKERS_ENV, "1"))


def _date(s):
    return dt.date.fromisoformat(s)


def cmd_synth(a) -> int:
    pairs = default_planted_pairs(a.pairs, a.rho_min, a.rho_max, seed=a.seed)
    cfg = SynthConfig(n_securities=a.securities, n_days=a.days, start=a.start,
                      planted_pairs=pairs, activity=a.activity, seed=a.seed)
    tx = generate(cfg)
    out = Path(a.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    io.write_transactions(out, tx, gender_seed=a.seed)
    io.write_postal_map(a.postal_map, SYNTH_POSTAL_MAP)
    if a.truth:
        text = io.csv_text(("source", "target", "rho"),
                            [(str(p.a), str(p.b), f"{p.rho:.6f}") for p in pairs])
        Path(a.truth).write_text(text)
    print(f"wrote {len(tx)} transactions for {a.securities} securities to {out}")
    return EXIT_OK


def _load(a):
    res = io.ingest(a.input, a.postal_map)
    if a.rejects:
        io.write_rejects(a.rejects, res.rejects)
    if res.reject_rate > a.max_reject_rate:
        print(f"reject rate {res.reject_rate:.2%} exceeds {a.max_reject_rate:.2%}",
              file=sys.stderr)
        return res, EXIT_INVALID
    return res, EXIT_OK


def cmd_ingest(a) -> int:
    res, code = _load(a)
    print(json.dumps(res.summary(), indent=1))
    for r in res.rejects[:20]:
        print(f"line {r.line}: {r.reason}: {r.detail}", file=sys.stderr)
    return code


def cmd_infer(a) -> int:
    res, code = _load(a)
    if code:
        return code
    tx = res.transactions.for_security(a.security) if a.security else res.transactions
    if a.start or a.end:
        lo = a.start or tx.dates.min().item()
        hi = a.end or tx.dates.max().item() + dt.timedelta(days=1)
        tx = tx.where((tx.dates >= np.datetime64(lo)) & (tx.dates < np.datetime64(hi)))
    if not len(tx):
        print("no transactions selected", file=sys.stderr)
        return EXIT_INVALID
    ens = infer_bootstrap_ensemble(tx, trading_calendar(tx), a.n_boot, a.method, a.alpha_mi,
                                   a.null_replicas, a.seed, a.null_scope,
                                   workers=_workers())
    meta = {"security_id": a.security, "n_boot": a.n_boot, "method": a.method,
            "alpha_mi": a.alpha_mi, "null_replicas": a.null_replicas, "seed": a.seed}
    Path(a.out).write_text(io.dumps(io.ensemble_to_dict(ens, **meta)))
    print(f"wrote {len(ens)} network(s) to {a.out}")
    return EXIT_OK


def cmd_aggregate(a) -> int:
    ens = [g for p in a.inputs for g in io.load_networks(p)]
    rep = aggregate(ens, a.alpha, a.inclusive)
    text = io.export(rep, "json", a.out)
    if not a.out:
        sys.stdout.write(text)
    print(f"N={rep.counts.ensemble_size} p_hat={rep.p_hat:.6g} n_tests={rep.n_tests} "
          f"threshold={rep.threshold} edges={len(rep.result)}", file=sys.stderr)
    return EXIT_DEGENERATE if rep.degenerate else EXIT_OK


def cmd_pipeline(a) -> int:
    cfg = PipelineConfig()
    if a.manifest:
        cfg = config_from_manifest(a.manifest)
    if a.config:
        cfg = PipelineConfig.from_text(Path(a.config).read_text())
    overrides = {k: v for k, v in (s.split("=", 1) for s in a.set)} if a.set else {}
    for key in ("input", "postal_map", "output", "seed", "order", "method", "n_boot",
                "window_months", "alpha", "alpha_mi", "null_replicas"):
        v = getattr(a, key)
        if v is not None:
            overrides[key] = str(v)
    cfg = cfg.update(overrides)
    res = run_pipeline(cfg, workers=_workers())
    print(f"final network: {len(res.final)} edges; manifest {res.manifest['manifest_hash']}")
    return EXIT_DEGENERATE if res.degenerate else EXIT_OK


def cmd_compare(a) -> int:
    ga = io.load_networks(a.a)[0]
    gb = io.load_networks(a.b)[0]
    text = io.export([(a.label, compare_networks(ga, gb))], "comparison", a.out)
    if not a.out:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_centrality(a) -> int:
    g = io.load_networks(a.input)[0]
    text = io.centrality_csv(centrality_report(g))
    if a.out:
        Path(a.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_export(a) -> int:
    nets = io.load_networks(a.input)
    if a.format == "occurrence":
        obj = occurrence_matrix(nets, a.top_k)
    elif a.format == "comparison":
        if len(nets) < 2:
            print("comparison export needs an ensemble of at least two networks",
                  file=sys.stderr)
            return EXIT_INVALID
        obj = [(f"1 vs {k + 1}", compare_networks(nets[0], g)) for k, g in enumerate(nets[1:], 1)]
    else:
        obj = nets[0]
    text = io.export(obj, a.format, a.out)
    if not a.out:
        sys.stdout.write(text)
    return EXIT_OK


def _data_args(p):
    p.add_argument("input", help="transaction CSV")
    p.add_argument("--postal-map", required=True, help="postal_code,region CSV")
    p.add_argument("--rejects", help="write rejected rows here")
    p.add_argument("--max-reject-rate", type=float, default=0.0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="invnet", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic transaction CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--postal-map", required=True, help="where to write the postal map")
    p.add_argument("--truth", help="write planted pairs here")
    p.add_argument("--securities", type=int, default=1)
    p.add_argument("--days", type=int, default=250)
    p.add_argument("--start", type=_date, default=dt.date(2004, 1, 1))
    p.add_argument("--pairs", type=int, default=20)
    p.add_argument("--rho-min", type=float, default=0.6)
    p.add_argument("--rho-max", type=float, default=0.9)
    p.add_argument("--activity", type=float, default=4.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ingest", help="validate a transaction CSV and summarise it")
    _data_args(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("infer", help="bootstrap ensemble for one security")
    _data_args(p)
    p.add_argument("--out", required=True)
    p.add_argument("--security")
    p.add_argument("--start", type=_date)
    p.add_argument("--end", type=_date)
    p.add_argument("--n-boot", type=int, default=100)
    p.add_argument("--method", choices=METHODS, default="c3net")
    p.add_argument("--alpha-mi", type=float, default=0.01)
    p.add_argument("--null-replicas", type=int, default=100)
    p.add_argument("--null-scope", choices=("replica", "shared"), default="replica")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("aggregate", help="aggregate network/ensemble JSON files")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--inclusive", action="store_true", help="use P(X >= n) tails")
    p.add_argument("--out")
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("pipeline", help="security x window pipeline")
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--manifest", help="rerun the configuration recorded in a manifest")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override any key")
    p.add_argument("--input")
    p.add_argument("--postal-map", dest="postal_map")
    p.add_argument("--output")
    p.add_argument("--seed", type=int)
    p.add_argument("--order", choices=("ST", "TS", "none"))
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--n-boot", dest="n_boot", type=int)
    p.add_argument("--window-months", dest="window_months")
    p.add_argument("--alpha", type=float)
    p.add_argument("--alpha-mi", dest="alpha_mi", type=float)
    p.add_argument("--null-replicas", dest="null_replicas", type=int)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("compare", help="overlap of two networks")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--label", default="a vs b")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("centrality", help="degree, load and closeness per node")
    p.add_argument("input")
    p.add_argument("--out")
    p.set_defaults(func=cmd_centrality)

    p = sub.add_parser("export", help="convert a network, report or ensemble")
    p.add_argument("input")
    p.add_argument("--format", required=True, choices=io.EXPORT_FORMATS)
    p.add_argument("--top-k", type=int, default=54)
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
