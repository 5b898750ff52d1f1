"""Investor-category networks from transaction data.

Bootstrapped mutual-information inference (C3NET, MST) and statistically
validated aggregation of network ensembles across bootstrap replicas,
securities and time windows.
"""
__version__ = "0.1.0"

from .model import (CATEGORIES, AggregationReport, BinaryNetwork, CategoryId, EnsembleGrid,
                    Group, MIMatrix, NetVolumeMatrix, Region, Sector, Transaction,
                    TransactionTable, WeightedCountNetwork)
from .categorization import age_group, assign_category, category_universe
from .netvolume import bootstrap_resample, build_net_volume, month_windows, null_resample
from .mi import mi_from_rho, mi_matrix, null_mi_distribution, pearson, significance_mask
from .inference import c3net, infer_bootstrap_ensemble, infer_network, mst
from .aggregation import (aggregate, aggregate_layers, binomial_tail, ensemble_counts,
                          estimate_link_probability, multilayer_aggregate,
                          occurrence_threshold)
from .analysis import centrality_report, compare_networks, occurrence_matrix

__all__ = [
    "CATEGORIES", "AggregationReport", "BinaryNetwork", "CategoryId", "EnsembleGrid", "Group",
    "MIMatrix", "NetVolumeMatrix", "Region", "Sector", "Transaction", "TransactionTable",
    "WeightedCountNetwork", "age_group", "assign_category", "category_universe",
    "bootstrap_resample", "build_net_volume", "month_windows", "null_resample", "mi_from_rho",
    "mi_matrix", "null_mi_distribution", "pearson", "significance_mask", "c3net",
    "infer_bootstrap_ensemble", "infer_network", "mst", "aggregate", "aggregate_layers",
    "binomial_tail", "ensemble_counts", "estimate_link_probability", "multilayer_aggregate",
    "occurrence_threshold", "centrality_report", "compare_networks", "occurrence_matrix",
]
