"""Ready-made settings, tables and quantum scenarios used by the CLI and demos."""

from __future__ import annotations

import numpy as np

from .bell_polytope import ChshSettings
from .general_model import CorrelationTable
from .quantum_core import (
    PovmFamily,
    UnitVector3,
    basis_povm,
    maximally_entangled_state,
    singlet_state,
    spin_povm_family,
)
from .singlet_models import singlet_joint

# Coplanar angles (radians) for which E(x,y)+E(x,y')+E(x',y)-E(x',y') = 2 sqrt 2
# on the singlet, whose correlator is -cos(angle difference).
OPTIMAL_CHSH_ANGLES = (0.0, np.pi / 2, 5 * np.pi / 4, 3 * np.pi / 4)


def coplanar(angle: float) -> UnitVector3:
    """Unit vector at ``angle`` in the x-z plane, measured from +z."""
    return UnitVector3.from_angles(angle, 0.0)


def chsh_directions(angles=OPTIMAL_CHSH_ANGLES) -> ChshSettings:
    return ChshSettings(*(coplanar(a) for a in angles))


def chsh_labels() -> ChshSettings:
    return ChshSettings("x0", "x1", "y0", "y1")


def chsh_label_settings() -> list[tuple[str, str]]:
    return [(x, y) for x in ("x0", "x1") for y in ("y0", "y1")]


def singlet_table(x_dirs: dict, y_dirs: dict, settings=None) -> CorrelationTable:
    """Exact singlet table ``(1 - a b x.y)/4`` on labelled directions."""
    if settings is None:
        settings = [(x, y) for x in x_dirs for y in y_dirs]
    return CorrelationTable.from_function(settings, (2, 2), lambda x, y: singlet_joint(x_dirs[x], y_dirs[y]))


def singlet_chsh_table(angles=OPTIMAL_CHSH_ANGLES) -> CorrelationTable:
    d = chsh_directions(angles)
    return singlet_table({"x0": d.x, "x1": d.x_prime}, {"y0": d.y, "y1": d.y_prime})


def uniform_table(settings=None) -> CorrelationTable:
    settings = chsh_label_settings() if settings is None else settings
    return CorrelationTable.from_function(settings, (2, 2), lambda x, y: np.full((2, 2), 0.25))


def signalling_table() -> CorrelationTable:
    """Bob's outcome equals Alice's setting (``b = +1`` for ``x0``, ``-1`` for ``x1``); Alice's is uniform."""
    def joint(x, y):
        p = np.zeros((2, 2))
        p[:, 0 if x == "x0" else 1] = 0.5
        return p

    return CorrelationTable.from_function(chsh_label_settings(), (2, 2), joint)


def grid_directions(n: int, prefix: str) -> dict:
    """``n`` well-spread directions (Fibonacci lattice) keyed ``prefix0..``."""
    out = {}
    golden = np.pi * (3.0 - np.sqrt(5.0))
    for k in range(n):
        z = 1.0 - 2.0 * (k + 0.5) / n
        r = np.sqrt(1.0 - z * z)
        out[f"{prefix}{k}"] = UnitVector3.normalized([r * np.cos(golden * k), r * np.sin(golden * k), z])
    return out


def singlet_scenario(n: int = 8):
    """Singlet state with projective spin POVMs on an ``n x n`` direction grid."""
    xd = grid_directions(n, "x")
    yd = {k.replace("x", "y"): v for k, v in grid_directions(n, "x").items()}
    # Offset Bob's grid so x.y takes varied values.
    yd = {k: UnitVector3.normalized(np.array(v)[[1, 2, 0]]) for k, v in yd.items()}
    return singlet_state(), spin_povm_family(xd, yd), xd, yd


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def qudit_scenario(d: int = 3, n: int = 3, seed: int = 0):
    """Maximally entangled two-qudit state with ``n`` random projective bases per side."""
    rng = np.random.default_rng(seed)
    xp = {f"x{k}": basis_povm(random_unitary(d, rng)) for k in range(n)}
    yp = {f"y{k}": basis_povm(random_unitary(d, rng)) for k in range(n)}
    return maximally_entangled_state(d), PovmFamily.from_local(xp, yp)
