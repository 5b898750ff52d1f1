import datetime as dt
import pickle

import numpy as np
import pytest

from invnet.model import (CATEGORIES, N_CATEGORIES, BinaryNetwork, CategoryId, EnsembleGrid,
                          Group, MIMatrix, NetVolumeMatrix, Region, Sector, Transaction,
                          TransactionTable, WeightedCountNetwork)


def test_universe_has_99_ordered_categories():
    assert N_CATEGORIES == 99 == len(CATEGORIES)
    assert list(CATEGORIES) == sorted(CATEGORIES)
    assert [c.index for c in CATEGORIES] == list(range(99))
    assert str(CATEGORIES[0]) == "FinancialInsurance|Helsinki"
    assert str(CATEGORIES[-1]) == "Retired|Northern-Finland"


def test_category_label_round_trip():
    for c in CATEGORIES:
        assert CategoryId.parse(str(c)) == c
        assert CategoryId.from_index(c.index) == c
    with pytest.raises(ValueError):
        CategoryId.parse("Nope|Helsinki")
    with pytest.raises(ValueError):
        CategoryId.from_index(99)


def test_group_sector():
    assert Group.YOUNG.is_household and Group.YOUNG.sector is Sector.HOUSEHOLD
    assert Group.GOVERNMENT.sector is Sector.GOVERNMENT
    assert not Group.NON_PROFIT.is_household


def test_transaction_validation():
    kw = dict(trade_date=dt.date(2004, 1, 2), investor_id="x", region=Region.HELSINKI,
              security_id="S")
    with pytest.raises(ValueError):
        Transaction(sector=Sector.HOUSEHOLD, birth_year=1960, signed_volume=0, **kw)
    with pytest.raises(ValueError):
        Transaction(sector=Sector.HOUSEHOLD, birth_year=None, signed_volume=5, **kw)
    with pytest.raises(ValueError):
        Transaction(sector=Sector.GOVERNMENT, birth_year=1960, signed_volume=5, **kw)
    Transaction(sector=Sector.GOVERNMENT, birth_year=None, signed_volume=-5, **kw)


def test_table_round_trip_and_immutability():
    kw = dict(investor_id="x", region=Region.SOUTH_WEST, security_id="S")
    txs = [Transaction(dt.date(2004, 1, 2), sector=Sector.HOUSEHOLD, birth_year=1960,
                       signed_volume=10, **kw),
           Transaction(dt.date(2004, 1, 5), sector=Sector.NON_PROFIT, birth_year=None,
                       signed_volume=-3, **kw)]
    t = TransactionTable.from_transactions(txs)
    assert list(t) == txs
    assert t.category.tolist() == [CategoryId(Group.MIDDLE_AGED, Region.SOUTH_WEST).index,
                                   CategoryId(Group.NON_PROFIT, Region.SOUTH_WEST).index]
    with pytest.raises(AttributeError):
        t.volume = None
    with pytest.raises(ValueError):
        t.volume[0] = 1
    assert list(pickle.loads(pickle.dumps(t))) == txs
    assert len(t[:1]) == 1 and len(TransactionTable.empty()) == 0


def test_net_volume_matrix_checks():
    d = np.array(["2004-01-02", "2004-01-05"], "datetime64[D]")
    NetVolumeMatrix(d, np.zeros((2, 99)))
    with pytest.raises(ValueError):
        NetVolumeMatrix(d, np.zeros((2, 98)))
    with pytest.raises(ValueError):
        NetVolumeMatrix(d[::-1], np.zeros((2, 99)))


def test_binary_network_normalises_edges():
    g = BinaryNetwork(frozenset({(3, 1), (0, 2)}), nodes=tuple("abcd"))
    assert g.sorted_edges() == [(0, 2), (1, 3)]
    assert g.edge_labels() == [("a", "c"), ("b", "d")]
    assert g.degree().tolist() == [1, 1, 1, 1]
    assert g.adjacency()[3, 1]
    assert BinaryNetwork.from_adjacency(g.adjacency(), tuple("abcd")) == g
    assert BinaryNetwork.from_labels([("d", "b"), ("a", "c")], tuple("abcd")) == g
    with pytest.raises(ValueError):
        BinaryNetwork(frozenset({(1, 1)}), nodes=tuple("ab"))
    with pytest.raises(ValueError):
        BinaryNetwork(frozenset({(0, 4)}), nodes=tuple("abcd"))
    # metadata does not take part in equality
    assert g.with_metadata(x=1) == g and g.with_metadata(x=1).metadata["x"] == 1


def test_weighted_counts_validation():
    with pytest.raises(ValueError):
        WeightedCountNetwork(np.array([[0, 1], [0, 0]]), 1, ("a", "b"))
    with pytest.raises(ValueError):
        WeightedCountNetwork(np.array([[0, 3], [3, 0]]), 2, ("a", "b"))
    c = WeightedCountNetwork(np.array([[0, 2, 1], [2, 0, 0], [1, 0, 0]]), 2, tuple("abc"))
    assert c.total_edges == 3 and c.distinct_edges == 2


def test_mi_matrix_pairs():
    v = np.array([[np.nan, 0.1, np.nan], [0.1, np.nan, 0.3], [np.nan, 0.3, np.nan]])
    m = MIMatrix(v, np.array([True, True, True]), np.zeros((3, 3), bool), tuple("abc"))
    assert m.pair_values().tolist() == [0.1, 0.3]


def test_grid_shape_checks():
    g = BinaryNetwork(nodes=tuple("ab"))
    grid = EnsembleGrid([[g, g, g], [g, g, g]], ("s1", "s2"), ("t1", "t2", "t3"))
    assert grid.shape == (2, 3) and len(grid.column(1)) == 2 and len(grid.row(0)) == 3
    with pytest.raises(ValueError):
        EnsembleGrid([[g, g]], ("s1",), ("t1", "t2", "t3"))
    with pytest.raises(ValueError):
        EnsembleGrid([[g, BinaryNetwork(nodes=tuple("xy"))]], ("s1",), ("t1", "t2"))


def test_networks_and_reports_pickle():
    from invnet.aggregation import aggregate
    g = BinaryNetwork(frozenset({(0, 1)}), tuple("abc"), {"seed": 4})
    h = pickle.loads(pickle.dumps(g))
    assert h == g and h.metadata["seed"] == 4
    rep = aggregate([g, g])
    back = pickle.loads(pickle.dumps(rep))
    assert back.result == rep.result and back.p_hat == rep.p_hat
