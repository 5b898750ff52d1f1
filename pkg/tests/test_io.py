import datetime as dt
import json

import numpy as np
import pytest

from invnet import io
from invnet.aggregation import aggregate
from invnet.analysis import compare_networks, occurrence_matrix
from invnet.model import CATEGORIES, BinaryNetwork, Region
from invnet.synth import SYNTH_POSTAL_MAP, SynthConfig, generate

HEADER = ",".join(io.TX_COLUMNS) + ",gender\n"


@pytest.fixture
def postal(tmp_path):
    p = tmp_path / "postal.csv"
    io.write_postal_map(p, {"00100": Region.HELSINKI, "90100": Region.NORTHERN_FINLAND})
    return p


def write(tmp_path, body):
    p = tmp_path / "tx.csv"
    p.write_text(HEADER + body)
    return p


def test_valid_three_rows(tmp_path, postal):
    p = write(tmp_path, "2004-01-02,a,HH,1960,00100,NOK,100,F\n"
                        "2004-01-02,b,FI,,90100,NOK,-40,\n"
                        "2004-01-05,c,GG,,00100,ELI,7,M\n")
    res = io.ingest(p, postal)
    assert len(res.transactions) == 3 and not res.rejects and res.reject_rate == 0.0
    tx = res.transactions
    assert str(CATEGORIES[tx.category[0]]) == "Middle-Aged|Helsinki"
    assert str(CATEGORIES[tx.category[1]]) == "FinancialInsurance|Northern-Finland"
    s = res.summary()
    assert s["accepted"] == 3 and s["date_range"] == ["2004-01-02", "2004-01-05"]
    assert s["per_category"]["Government|Helsinki"] == 1
    assert [r["security_id"] for r in s["securities"]] == ["NOK", "ELI"]


@pytest.mark.parametrize("row, reason", [
    ("2004-01-02,a,HH,2010,00100,NOK,100,F", "age"),
    ("2004-13-02,a,HH,1960,00100,NOK,100,F", "date"),
    ("2004-01-02,a,XX,,00100,NOK,100,F", "sector"),
    ("2004-01-02,a,HH,,00100,NOK,100,F", "birth_year"),
    ("2004-01-02,a,NF,1960,00100,NOK,100,F", "birth_year"),
    ("2004-01-02,a,HH,19x0,00100,NOK,100,F", "birth_year"),
    ("2004-01-02,a,HH,1960,99999,NOK,100,F", "postal"),
    ("2004-01-02,a,HH,1960,00100,NOK,0,F", "volume"),
    ("2004-01-02,a,HH,1960,00100,NOK,1.5,F", "volume"),
    ("2004-01-02,,HH,1960,00100,NOK,10,F", "format"),
])
def test_rejects_carry_reason_and_line(tmp_path, postal, row, reason):
    p = write(tmp_path, "2004-01-02,ok,GG,,00100,NOK,5,\n" + row + "\n")
    res = io.ingest(p, postal)
    assert len(res.transactions) == 1
    assert [(r.line, r.reason) for r in res.rejects] == [(3, reason)]
    assert res.reject_rate == 0.5
    out = tmp_path / "rej.csv"
    io.write_rejects(out, res.rejects)
    assert out.read_text().splitlines()[1].startswith(f"3,{reason},")


def test_period_filter_and_missing_columns(tmp_path, postal):
    p = write(tmp_path, "2004-01-02,a,GG,,00100,NOK,5,\n2005-01-02,a,GG,,00100,NOK,5,\n")
    res = io.ingest(p, postal, period=(dt.date(2004, 1, 1), dt.date(2005, 1, 1)))
    assert len(res.transactions) == 1 and res.rejects[0].reason == "date"
    bad = tmp_path / "bad.csv"
    bad.write_text("trade_date,investor_id\n2004-01-02,a\n")
    with pytest.raises(ValueError, match="missing columns"):
        io.ingest(bad, postal)


def test_bad_postal_map(tmp_path):
    p = tmp_path / "pm.csv"
    p.write_text("postal_code,region\n00100,Atlantis\n")
    with pytest.raises(ValueError):
        io.read_postal_map(p)


def test_synthetic_round_trip(tmp_path):
    tx = generate(SynthConfig(n_securities=2, n_days=20, seed=4))
    path, pm = tmp_path / "tx.csv", tmp_path / "pm.csv"
    io.write_transactions(path, tx, gender_seed=1)
    io.write_postal_map(pm, SYNTH_POSTAL_MAP)
    res = io.ingest(path, pm)
    assert not res.rejects and len(res.transactions) == len(tx)
    for col in ("category", "volume", "sector", "birth_year", "region"):
        np.testing.assert_array_equal(getattr(res.transactions, col), getattr(tx, col))
    np.testing.assert_array_equal(res.transactions.dates, tx.dates)


def labelled(*pairs):
    return BinaryNetwork.from_labels(pairs, seed=3, method="c3net")


def test_network_json_round_trip():
    g = labelled(("Young|Helsinki", "Retired|Ostrobothnia"), ("Government|Helsinki", "Young|Helsinki"))
    d = io.network_to_dict(g)
    assert d["nodes"][0] == "FinancialInsurance|Helsinki" and d["metadata"]["seed"] == 3
    back = io.network_from_dict(json.loads(io.dumps(d)))
    assert back == g and back.nodes is CATEGORIES
    toy = BinaryNetwork(frozenset({(0, 1)}), ("x", "y"))
    assert io.network_from_dict(io.network_to_dict(toy)) == toy


def test_dumps_is_stable():
    g = labelled(("Young|Helsinki", "Retired|Ostrobothnia"))
    a = io.dumps(io.network_to_dict(g))
    assert a == io.dumps(io.network_to_dict(g.with_metadata())) and a.endswith("\n")
    with pytest.raises(ValueError):
        io.dumps({"x": float("nan")})


def test_edge_list_export():
    assert io.export(BinaryNetwork(), "edges") == "source,target\n"
    g = labelled(("Young|Helsinki", "Government|Helsinki"),
                 ("FinancialInsurance|Helsinki", "Retired|Helsinki"))
    lines = io.export(g, "edges").splitlines()
    assert lines == ["source,target", "FinancialInsurance|Helsinki,Retired|Helsinki",
                     "Government|Helsinki,Young|Helsinki"]


def test_report_json_fields(tmp_path):
    g = labelled(("Young|Helsinki", "Government|Helsinki"))
    rep = aggregate([g, g, BinaryNetwork()], 0.05)
    d = json.loads(io.export(rep, "json", tmp_path / "r.json"))
    for k in ("p_hat", "n_tests", "alpha_adjusted", "threshold", "counts", "tail"):
        assert k in d
    assert d["counts"]["entries"] == [["Government|Helsinki", "Young|Helsinki", 2]]
    assert d["tail"] == "exceeds"
    assert io.load_networks(tmp_path / "r.json")[0] == rep.result


def test_ensemble_json(tmp_path):
    ens = [labelled(("Young|Helsinki", "Government|Helsinki")), BinaryNetwork()]
    p = tmp_path / "e.json"
    p.write_text(io.dumps(io.ensemble_to_dict(ens, seed=1)))
    assert io.load_networks(p) == ens


def test_dot_export_colours():
    g = labelled(("Young|Helsinki", "Government|Helsinki"),
                 ("NonProfit|Helsinki", "FinancialInsurance|South-West"))
    text = io.export(g, "dot")
    assert text.startswith('graph "investors" {')
    assert '"Young|Helsinki" [class="Households", fillcolor="#c686e9"]' in text
    assert '"NonProfit|Helsinki" [class="Non-profit organizations", fillcolor="#ea8615"]' in text
    assert 'fillcolor="#00caff"' in text
    assert '"Government|Helsinki" -- "Young|Helsinki";' in text
    assert "Retired" not in text
    assert io.export(g, "dot") == text
    assert set(io.SECTOR_CLASSES) == {io.sector_class(c) for c in CATEGORIES}


def test_occurrence_and_comparison_exports():
    ens = [labelled(("Young|Helsinki", "Government|Helsinki")), labelled()]
    t = occurrence_matrix(ens, 5)
    assert io.export(t, "occurrence").splitlines() == [
        "source,target,count,1,2", "Government|Helsinki,Young|Helsinki,1,1,0"]
    with pytest.raises(TypeError):
        io.export(ens[0], "occurrence")
    text = io.export([("w1", compare_networks(ens[0], ens[0]))], "comparison")
    head, row = text.splitlines()
    assert head.startswith("label,nodes_a_only") and row.startswith("w1,0,2,0,1")


def test_unknown_format():
    with pytest.raises(ValueError, match="unknown export format"):
        io.export(BinaryNetwork(), "graphml")
