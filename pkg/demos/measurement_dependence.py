"""How much setting information each model's hidden variable must carry.

Run: python3 demos/measurement_dependence.py
"""

import math

import numpy as np

from bellsep.catalog import coplanar
from bellsep.info_measures import cmd_report, sphere_conditional_entropy
from bellsep.singlet_models import hall_density
from bellsep.sphere import pair_rule

for kind in ("brans", "degorre", "hall"):
    r = cmd_report(kind)
    exact = "n/a" if r.exact_value is None else f"{r.exact_value:.6f}"
    print(f"{kind:8s} H_max {r.h_max:.4f}  inf H(lambda|x,y) {r.inf_hxy:.4f}  bound {r.upper_bound:.6f}  exact {exact}")
    for note in r.notes:
        print(f"         {note}")

print(f"\nDegorre reference value log2(2/sqrt(e)) = {math.log2(2 / math.sqrt(math.e)):.6f}")

# The Hall density is piecewise constant; its entropy dips below log2(4 pi)
# for intermediate angles and recovers at 0 and pi/2.
z = np.array([0.0, 0.0, 1.0])
print("\nHall conditional entropy deficit vs angle:")
for phi in np.linspace(0.0, np.pi / 2, 7):
    h = sphere_conditional_entropy("hall", z, np.array(coplanar(phi)))
    print(f"  {phi:.3f}  {round(math.log2(4 * math.pi) - h, 5) + 0.0:.5f}")

rule = pair_rule(z, np.array(coplanar(0.4)))
print(f"\nHall density integrates to {rule.integrate(hall_density(rule.nodes, z, np.array(coplanar(0.4)))):.12f}")
