"""Local deterministic models of the two-qubit singlet state.

Three measurement-dependent models are provided:

* ``BRANS``: a pair of signs ``(l1, l2)`` carries both outcomes; its weight
  ``(1 - l1 l2 x.y)/4`` depends on both settings.
* ``DEGORRE``: a classical spin vector ``lam`` on the sphere with density
  ``|lam.x|/(2 pi)``, correlated with Alice's direction only.
* ``HALL``: the same spin-vector outcome rule, with a density that depends on
  the sign of ``(lam.x)(lam.y)`` and the angle between the directions.

Outcomes are ``+1`` / ``-1``. Joint distributions are 2x2 arrays indexed
``[i_a, i_b]`` with index 0 for ``+1`` and index 1 for ``-1`` (see
:data:`OUTCOMES`).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .quantum_core import as_direction
from .sphere import (
    DEFAULT_AZIMUTH_ORDER,
    DEFAULT_POLAR_ORDER,
    angle_between,
    pair_rule,
    rotation_from_z,
    uniform_sphere,
)

OUTCOMES = (1, -1)
SIGN_PAIRS = ((1, 1), (1, -1), (-1, 1), (-1, -1))

NORMALIZATION_TOL = 1e-5
MAX_REJECTIONS = 10**6


class NumericalError(RuntimeError):
    pass


class ModelKind(str, enum.Enum):
    BRANS = "brans"
    DEGORRE = "degorre"
    HALL = "hall"


def sign(v):
    """Sign with ``sign(0) = +1``."""
    return np.where(np.asarray(v) >= 0, 1, -1)


def singlet_joint(x, y) -> np.ndarray:
    """Quantum prediction ``(1 - a b x.y)/4`` as a 2x2 array."""
    c = float(np.dot(as_direction(x), as_direction(y)))
    ab = np.outer(OUTCOMES, OUTCOMES)
    return (1.0 - ab * c) / 4.0


# -- Brans -------------------------------------------------------------------

def brans_weight(lam, x, y) -> float:
    """Weight of the sign pair ``lam`` given settings ``x``, ``y``."""
    l1, l2 = lam
    if l1 not in (1, -1) or l2 not in (1, -1):
        raise ValueError(f"sign pair must have entries +1/-1, got {lam!r}")
    return (1.0 - l1 * l2 * float(np.dot(as_direction(x), as_direction(y)))) / 4.0


def brans_weights(x, y) -> np.ndarray:
    """The four Brans weights in :data:`SIGN_PAIRS` order."""
    return np.array([brans_weight(lam, x, y) for lam in SIGN_PAIRS])


def brans_outcome(lam) -> tuple[int, int]:
    l1, l2 = lam
    return int(l1), int(l2)


# -- sphere models -----------------------------------------------------------

def degorre_density(lam, x):
    """``|lam.x| / (2 pi)`` per unit solid angle; ``lam`` may be (3,) or (N, 3)."""
    return np.abs(np.asarray(lam, dtype=float) @ as_direction(x)) / (2.0 * np.pi)


def _hall_branch_values(phi: float) -> tuple[float, float]:
    """Density times 4 pi on the ``sign = +1`` and ``sign = -1`` regions."""
    c = np.cos(phi)
    k = 1.0 - 2.0 * phi / np.pi
    plus = (1.0 + c) / (1.0 + k) if 1.0 + k > 0.0 else 0.0
    minus = (1.0 - c) / (1.0 - k) if 1.0 - k > 0.0 else 0.0
    return plus, minus


def hall_density(lam, x, y):
    """Hall density per unit solid angle; ``lam`` may be (3,) or (N, 3).

    On the measure-zero branch where numerator and denominator both vanish
    (``phi in {0, pi}``) the value is 0.
    """
    x = as_direction(x)
    y = as_direction(y)
    lam = np.asarray(lam, dtype=float)
    s = sign((lam @ x) * (lam @ y))
    plus, minus = _hall_branch_values(angle_between(x, y))
    return np.where(s > 0, plus, minus) / (4.0 * np.pi)


def hall_envelope(x, y) -> float:
    """Supremum of ``4 pi`` times the Hall density."""
    return max(_hall_branch_values(angle_between(x, y)))


def local_outcomes(lam, x, y):
    """``a = sign(lam.x)``, ``b = -sign(lam.y)``, with ``sign(0) = +1``."""
    lam = np.asarray(lam, dtype=float)
    a = sign(lam @ as_direction(x))
    b = -sign(lam @ as_direction(y))
    if lam.ndim == 1:
        return int(a), int(b)
    return a, b


def outcome_a(lam, x):
    return sign(np.asarray(lam, dtype=float) @ as_direction(x))


def outcome_b(lam, y):
    return -sign(np.asarray(lam, dtype=float) @ as_direction(y))


def _joint_from_outcomes(a, b, weights) -> np.ndarray:
    ia = (np.asarray(a) < 0).astype(int)
    ib = (np.asarray(b) < 0).astype(int)
    out = np.zeros((2, 2))
    np.add.at(out, (ia, ib), weights)
    return out


@dataclass(frozen=True)
class SingletModel:
    """One of the singlet models, selected by ``kind``."""

    kind: ModelKind
    tie_break_sign_zero: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        if self.tie_break_sign_zero != 1:
            raise ValueError("only the sign(0) = +1 convention is supported")

    @property
    def is_sphere(self) -> bool:
        return self.kind is not ModelKind.BRANS

    def density(self, lam, x, y):
        """Hidden-variable weight (Brans) or density per solid angle (sphere models)."""
        if self.kind is ModelKind.BRANS:
            return brans_weight(lam, x, y)
        if self.kind is ModelKind.DEGORRE:
            return degorre_density(lam, x)
        return hall_density(lam, x, y)

    def outcomes(self, lam, x, y):
        """Deterministic outcomes for a hidden variable or an array of them."""
        if self.kind is ModelKind.BRANS:
            lam = np.asarray(lam)
            if lam.ndim == 1:
                return brans_outcome(lam)
            return lam[:, 0], lam[:, 1]
        return local_outcomes(lam, x, y)

    def exact_joint(self, x, y, polar_order: int = DEFAULT_POLAR_ORDER, azimuth_order: int = DEFAULT_AZIMUTH_ORDER) -> np.ndarray:
        """``p(a, b | x, y)`` by summing (Brans) or integrating out the hidden variable."""
        if self.kind is ModelKind.BRANS:
            lams = np.array(SIGN_PAIRS)
            return _joint_from_outcomes(lams[:, 0], lams[:, 1], brans_weights(x, y))
        rule = pair_rule(x, y, polar_order, azimuth_order)
        dens = self.density(rule.nodes, x, y)
        norm = rule.integrate(dens)
        if abs(norm - 1.0) > NORMALIZATION_TOL:
            raise NumericalError(
                f"{self.kind.value} density integrates to {norm!r} at x.y={np.dot(as_direction(x), as_direction(y)):.6f} "
                f"with order {polar_order}x{azimuth_order}"
            )
        a, b = local_outcomes(rule.nodes, x, y)
        return _joint_from_outcomes(a, b, rule.weights * dens)

    def sample_hidden(self, x, y, rng: np.random.Generator, size: int | None = None):
        """Draw hidden variables from the model's distribution at settings ``(x, y)``.

        Returns one hidden variable when ``size`` is None, else an array of
        ``size`` of them: sign pairs of shape (size, 2) for Brans, unit
        vectors of shape (size, 3) for the sphere models.
        """
        n = 1 if size is None else int(size)
        if self.kind is ModelKind.BRANS:
            idx = rng.choice(4, size=n, p=brans_weights(x, y))
            out = np.array(SIGN_PAIRS)[idx]
        elif self.kind is ModelKind.DEGORRE:
            out = _sample_degorre(as_direction(x), rng, n)
        else:
            out = _sample_hall(as_direction(x), as_direction(y), rng, n)
        return out[0] if size is None else out


def _sample_degorre(x: np.ndarray, rng: np.random.Generator, n: int) -> np.ndarray:
    # Inverse transform in a frame with x as polar axis: cos(theta) = s sqrt(v).
    v = rng.random(n)
    s = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    ct = s * np.sqrt(v)
    az = 2.0 * np.pi * rng.random(n)
    st = np.sqrt(np.maximum(0.0, 1.0 - ct * ct))
    local = np.column_stack([st * np.cos(az), st * np.sin(az), ct])
    return local @ rotation_from_z(x).T


def _sample_hall(x: np.ndarray, y: np.ndarray, rng: np.random.Generator, n: int) -> np.ndarray:
    envelope = hall_envelope(x, y)
    out = np.empty((n, 3))
    filled = 0
    since_accept = 0
    while filled < n:
        need = n - filled
        batch = int(need * envelope * 1.1) + 16
        cand = uniform_sphere(rng, batch)
        ratio = hall_density(cand, x, y) * 4.0 * np.pi / envelope
        keep = cand[rng.random(batch) < ratio][:need]
        if keep.shape[0] == 0:
            since_accept += batch
            if since_accept > MAX_REJECTIONS:
                raise RuntimeError("Hall rejection sampler accepted nothing in 10^6 proposals; envelope is wrong")
            continue
        since_accept = 0
        out[filled:filled + keep.shape[0]] = keep
        filled += keep.shape[0]
    return out
