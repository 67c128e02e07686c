"""CHSH values, the local polytope, and an infeasibility certificate.

Run: python3 demos/chsh_and_polytope.py
"""

import numpy as np

from bellsep.bell_polytope import chsh_value, chsh_variants, deterministic_strategies, mixture_table, separability_feasible
from bellsep.catalog import OPTIMAL_CHSH_ANGLES, chsh_label_settings, chsh_labels, singlet_chsh_table, uniform_table

labels = chsh_labels()
singlet = singlet_chsh_table()
print(f"angles {np.round(OPTIMAL_CHSH_ANGLES, 4)}: singlet S = {chsh_value(singlet, labels):.6f}")

# Mixtures of the 16 deterministic strategies never exceed 2.
rng = np.random.default_rng(0)
strategies = deterministic_strategies(("x0", "x1"), ("y0", "y1"))
worst = max(
    max(chsh_variants(mixture_table(strategies, rng.dirichlet(np.ones(16) * 0.2), chsh_label_settings()), labels))
    for _ in range(500)
)
print(f"largest CHSH variant over 500 random local mixtures: {worst:.6f}")

# Membership test: a witness for local tables, a separating functional otherwise.
res = separability_feasible(uniform_table())
print(f"uniform table feasible: {res.feasible}, reconstruction error {res.reconstruction_error:.1e}")

res = separability_feasible(singlet)
print(f"singlet table feasible: {res.feasible}")
print(f"  certificate on table {res.certificate_table_value:.4f}, max over strategies {res.certificate_strategy_max:.4f}")
for s, c in res.certificate.items():
    print(f"  {s}: {np.round(c, 3).tolist()}")
