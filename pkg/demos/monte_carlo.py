"""Reproducible sampling: same seed, same counts, whatever the thread count.

Run: python3 demos/monte_carlo.py
"""

import time

import numpy as np

from bellsep import SingletModel, singlet_joint
from bellsep.catalog import chsh_directions, coplanar
from bellsep.montecarlo import RngSpec, estimate_chsh, estimate_joint, sample_counts

z = np.array([0.0, 0.0, 1.0])
y = np.array(coplanar(0.9))
hall = SingletModel("hall")

for workers in (1, 4):
    t0 = time.perf_counter()
    counts = sample_counts(hall, z, y, 10**6, RngSpec(7), workers=workers)
    print(f"{workers} worker(s): counts {counts.ravel().tolist()} in {time.perf_counter() - t0:.2f} s")

est = estimate_joint(hall, z, y, 10**6, RngSpec(7))
print("estimate vs exact, in standard errors:")
print(np.round((est.probs - singlet_joint(z, y)) / est.std_errors, 2))

for kind in ("brans", "degorre", "hall"):
    s = estimate_chsh(SingletModel(kind), chsh_directions(), 10**6, RngSpec(3))
    print(f"{kind:8s} S = {s.s.value:.4f} +/- {s.s.std_error:.4f}")
