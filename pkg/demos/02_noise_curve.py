#!/usr/bin/env python3
"""Test error as a function of the noise level in the training lexicon.

Desk-scale version of the high-dimensional experiment (d=50, n=1000,
clean test set of 300). The Procrustes error grows steadily with the
fraction of corrupted pairs; the noise-aware EM stays at numerical zero
because the clean pairs alone determine the map exactly.
"""

import collections

import numpy as np

from noisy_align.experiments import run_noise_curve

levels = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)
rows = run_noise_curve(n=1000, d=50, levels=levels, test_n=300,
                       seeds=range(5), methods=("op", "sgd", "em-hard"))

acc = collections.defaultdict(list)
for method, p, seed, train_err, test_err in rows:
    # per-pair mean over the 300 test pairs, the plottable quantity
    acc[(method, p)].append(test_err / 300)

print(f"{'p':>5} {'op':>12} {'sgd':>12} {'em-hard':>12}   (mean test error per pair)")
for p in levels:
    vals = [np.mean(acc[(m, p)]) for m in ("op", "sgd", "em-hard")]
    print(f"{p:>5.1f} " + " ".join(f"{v:>12.3e}" for v in vals))

print("\npaper-scale flags: run_noise_curve(n=5000, d=300, test_n=1500, ...)")
