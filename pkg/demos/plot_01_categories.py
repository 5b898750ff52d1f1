"""
Investor categories
===================

Every trade is attributed to one of 99 categories: nine sector-or-age
groups times eleven regions. Households are placed by their age in the
year of the trade, so one investor can move between groups over time.
"""
import datetime as dt

from invnet import CATEGORIES, CategoryId
from invnet.categorization import CategorizationError, InvestorMeta, age_group, assign_category
from invnet.model import Region, Sector

# the universe is fixed and ordered: group rank first, then region rank
print(len(CATEGORIES), "categories, first:", CATEGORIES[0], "last:", CATEGORIES[-1])

# age intervals are half-open on the left: (0,18], (18,30], (30,50], (50,64], (64,inf)
for birth in (1959, 1940, 1939):
    print(birth, "traded 2004-06-01 ->", age_group(birth, dt.date(2004, 6, 1)).value)

# the same household changes group between trades
m = InvestorMeta(Sector.HOUSEHOLD, 1956, Region.OSTROBOTHNIA)
for day in (dt.date(2004, 3, 1), dt.date(2009, 3, 1)):
    print(day, assign_category(m, day))

# non-households ignore age entirely
print(assign_category(InvestorMeta(Sector.NON_PROFIT, None, Region.HELSINKI), dt.date(2004, 1, 1)))

# labels round-trip and index into the universe
c = CategoryId.parse("Retired|South-East")
print(c, "has index", c.index)

# a trade before the birth year cannot be categorised
try:
    age_group(2010, dt.date(2004, 6, 1), record="row 17")
except CategorizationError as exc:
    print("rejected:", exc)
