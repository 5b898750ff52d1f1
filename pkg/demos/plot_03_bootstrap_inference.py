"""
Bootstrapped C3NET and MST ensembles
====================================

Whole transactions are resampled with replacement; each replica yields
one network. C3NET keeps every node's strongest significant partner, the
MST connects all eligible nodes. Planted pairs recur across replicas,
noise edges do not.
"""
from collections import Counter

from invnet import infer_bootstrap_ensemble, infer_network
from invnet.synth import SynthConfig, default_planted_pairs, generate, planted_edges

cfg = SynthConfig(n_days=250, planted_pairs=default_planted_pairs(10, seed=2), seed=2)
tx = generate(cfg)
truth = planted_edges(cfg)

# without bootstrapping: one network from the data as given
g = infer_network(tx, alpha_mi=1e-4)
print(f"unbootstrapped C3NET: {len(g)} edges, {len(g.edges & truth)}/{len(truth)} planted")

ens = infer_bootstrap_ensemble(tx, n_boot=20, alpha_mi=1e-4, null_replicas=50, seed=2)
counts = Counter(e for net in ens for e in net.edges)
planted_freq = sorted(counts[e] for e in truth)
noise_freq = sorted((c for e, c in counts.items() if e not in truth), reverse=True)
print("C3NET replica sizes:", [len(net) for net in ens])
print("planted edges seen in", planted_freq, "of 20 replicas")
print("most frequent noise edges seen in", noise_freq[:5], "of 20 replicas")

trees = infer_bootstrap_ensemble(tx, n_boot=5, method="mst", seed=2)
print("MST replica sizes:", [len(t) for t in trees], "over",
      len(trees[0].metadata["eligible"]), "eligible nodes")
