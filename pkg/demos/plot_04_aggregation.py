"""
Statistically validated aggregation
===================================

Edge counts over an ensemble are compared with a binomial null whose
link probability is the ensemble's edge density; a Bonferroni-adjusted
threshold keeps only edges that recur more often than chance.
"""
from fractions import Fraction

from invnet import aggregate, infer_bootstrap_ensemble, occurrence_threshold
from invnet.synth import SynthConfig, default_planted_pairs, generate, planted_edges

# published inputs: (N, p_hat, distinct edges) -> occurrence threshold
for n, p, tests in [(100, Fraction(8853, 485100), 1195), (12, Fraction(2361, 58212), 1420),
                    (12, Fraction(858, 58212), 673), (100, Fraction(20229, 485100), 3218)]:
    strict = occurrence_threshold(n, float(p), 0.01 / tests)
    inclusive = occurrence_threshold(n, float(p), 0.01 / tests, inclusive=True)
    print(f"N={n:3d} p={float(p):.5f} tests={tests}: n0 = {strict} (P(X > n)), "
          f"{inclusive} (P(X >= n))")

cfg = SynthConfig(n_days=250, planted_pairs=default_planted_pairs(20, seed=0), seed=100)
tx = generate(cfg)
truth = planted_edges(cfg)
ens = infer_bootstrap_ensemble(tx, n_boot=30, alpha_mi=1e-5, null_replicas=50, seed=0)
rep = aggregate(ens, alpha=0.01)
found = rep.result.edges
print(f"\nN={rep.counts.ensemble_size}, total edges {rep.counts.total_edges}, "
      f"distinct {rep.n_tests}, p_hat={rep.p_hat:.5f}, threshold {rep.threshold}")
print(f"kept {len(found)} edges: {len(found & truth)} planted, {len(found - truth)} spurious")

# aggregating spanning trees does not give a spanning tree
trees = infer_bootstrap_ensemble(tx, n_boot=20, method="mst", seed=0)
agg = aggregate(trees).result
print(f"\nMST members: {len(trees[0])} edges each; aggregate: {len(agg)} edges "
      f"on {len(agg.active_nodes())} nodes")
