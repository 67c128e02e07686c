"""Three hidden-variable models that reproduce singlet statistics.

Run: python3 demos/singlet_models.py
"""

import numpy as np

from bellsep import SingletModel, singlet_joint
from bellsep.catalog import coplanar

z = np.array([0.0, 0.0, 1.0])

# Every model returns the same 2x2 table (rows a = +1, -1; columns b = +1, -1)
# for a fixed pair of directions, computed by sphere quadrature or an exact sum.
for angle in (0.0, np.pi / 4, np.pi / 2, 2.0):
    y = np.array(coplanar(angle))
    print(f"angle {angle:.3f}: target p(+,+) = {singlet_joint(z, y)[0, 0]:.6f}")
    for kind in ("brans", "degorre", "hall"):
        p = SingletModel(kind).exact_joint(z, y)
        print(f"    {kind:8s} p(+,+) = {p[0, 0]:.6f}  max error {np.max(np.abs(p - singlet_joint(z, y))):.1e}")

# The models differ in what the hidden variable is and how it is distributed.
rng = np.random.default_rng(1)
y = np.array(coplanar(1.0))
for kind in ("brans", "degorre", "hall"):
    lam = SingletModel(kind).sample_hidden(z, y, rng, size=3)
    print(f"{kind} hidden variables at one setting pair:\n{np.round(lam, 3)}")

# Degorre: the density depends on x alone, so Alice's setting is correlated with lambda.
lam = SingletModel("degorre").sample_hidden(z, y, rng, size=100_000)
print(f"Degorre E|lambda.x| = {np.abs(lam @ z).mean():.4f} (uniform sphere would give 0.5)")
