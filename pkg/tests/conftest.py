import datetime as dt

import numpy as np
import pytest

from invnet.model import CATEGORIES, Region, Sector, TransactionTable


def make_table(rows):
    """Table from (date, category_index, volume[, security]) tuples."""
    cols = {k: [] for k in TransactionTable.__slots__}
    for r in rows:
        d, c, v = r[:3]
        sec = r[3] if len(r) > 3 else "S1"
        cat = CATEGORIES[c]
        sector = cat.group.sector
        birth = 0
        if sector is Sector.HOUSEHOLD:
            birth = {"Under-Aged": 10, "Young": 25, "Middle-Aged": 40, "Mature": 60,
                     "Retired": 70}[cat.group.value]
            birth = (d.year if isinstance(d, dt.date) else int(str(d)[:4])) - birth
        cols["dates"].append(d)
        cols["category"].append(c)
        cols["volume"].append(v)
        cols["sector"].append(tuple(Sector).index(sector))
        cols["birth_year"].append(birth)
        cols["region"].append(tuple(Region).index(cat.region))
        cols["investor"].append(f"inv{c}")
        cols["security"].append(sec)
    return TransactionTable(**cols)


@pytest.fixture
def table_factory():
    return make_table


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.VERDICTS:
        terminalreporter.write_line(line)
