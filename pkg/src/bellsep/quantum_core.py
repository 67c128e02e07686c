"""Small dense quantum-state primitives.

Matrices are plain ``numpy`` complex128 arrays. The validated wrappers
(:class:`DensityOperator`, :class:`Effect`, :class:`PovmFamily`) check their
invariants once at construction and are read-only afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
POVM_SUM_TOL = 1e-9
PROB_TOL = 1e-9
UNIT_TOL = 1e-12

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class ValidationError(ValueError):
    """An input violates a documented invariant."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite 2-D complex array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValidationError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries")
    return a


def _check_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    if a.shape[0] != a.shape[1]:
        raise ValidationError(f"matrix is not square: shape {a.shape}")
    dev = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if dev > tol:
        raise ValidationError(f"matrix is not Hermitian (max |M - M^H| = {dev:.3e})")


def hermitian_eig(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi.

    Returns ``(w, V)`` with eigenvalues ``w`` sorted in descending order and
    orthonormal eigenvectors in the columns of ``V``, so ``M = V diag(w) V^H``.
    """
    a = as_matrix(m)
    _check_hermitian(a)
    n = a.shape[0]
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)

    offmask = ~np.eye(n, dtype=bool)
    tol = JACOBI_TOL * max(1.0, float(np.linalg.norm(a)))
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.linalg.norm(a[offmask])
        if off < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = a[p, q]
                r = abs(g)
                if r == 0.0:
                    continue
                # Phase rotation makes the (p, q) entry real, then a real
                # Givens rotation annihilates it.
                phase = g / r
                theta = 0.5 * np.arctan2(2.0 * r, (a[q, q] - a[p, p]).real)
                c, s = np.cos(theta), np.sin(theta)
                j = np.eye(n, dtype=complex)
                j[p, p] = c
                j[p, q] = s
                j[q, p] = -s * np.conj(phase)
                j[q, q] = c * np.conj(phase)
                a = j.conj().T @ a @ j
                v = v @ j
    else:
        off = np.linalg.norm(a[offmask])
        if off >= tol:
            raise RuntimeError(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps (off-diagonal {off:.3e})")

    w = np.diag(a).real.copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product, first factor's index major."""
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(m, dims: tuple[int, int], keep: int) -> np.ndarray:
    """Reduced matrix of a bipartite operator; ``keep`` is 0 or 1."""
    d1, d2 = dims
    t = as_matrix(m).reshape(d1, d2, d1, d2)
    if keep == 0:
        return np.einsum("ijkj->ik", t)
    return np.einsum("ijil->jl", t)


@dataclass(frozen=True)
class UnitVector3:
    """Measurement direction on the unit sphere."""

    components: tuple[float, float, float]

    def __post_init__(self):
        c = tuple(float(v) for v in self.components)
        if len(c) != 3 or not all(np.isfinite(c)):
            raise ValidationError(f"need three finite components, got {self.components!r}")
        norm = float(np.linalg.norm(c))
        if abs(norm - 1.0) > UNIT_TOL:
            raise ValidationError(f"direction is not a unit vector (norm {norm!r})")
        object.__setattr__(self, "components", c)

    @classmethod
    def normalized(cls, v) -> "UnitVector3":
        v = np.asarray(v, dtype=float)
        return cls(tuple(v / np.linalg.norm(v)))

    @classmethod
    def from_angles(cls, theta: float, phi: float = 0.0) -> "UnitVector3":
        """Polar angle ``theta`` from +z, azimuth ``phi`` from +x."""
        st = np.sin(theta)
        return cls.normalized([st * np.cos(phi), st * np.sin(phi), np.cos(theta)])

    def __array__(self, dtype=None, copy=None):
        return np.array(self.components, dtype=dtype if dtype is not None else float)

    def dot(self, other) -> float:
        return float(np.dot(self.components, np.asarray(other, dtype=float)))


def as_direction(v) -> np.ndarray:
    """Return ``v`` as a float array, checking unit norm."""
    if isinstance(v, UnitVector3):
        return np.array(v.components)
    a = np.asarray(v, dtype=float)
    if a.shape != (3,):
        raise ValidationError(f"direction must have 3 components, got shape {a.shape}")
    if abs(np.linalg.norm(a) - 1.0) > UNIT_TOL:
        raise ValidationError(f"direction is not a unit vector (norm {np.linalg.norm(a)!r})")
    return a


class DensityOperator:
    """Validated quantum state: Hermitian, unit trace, positive semidefinite."""

    def __init__(self, matrix):
        a = as_matrix(matrix)
        _check_hermitian(a)
        tr = np.trace(a)
        if abs(tr - 1.0) > HERMITIAN_TOL:
            raise ValidationError(f"trace is {tr.real:.12g}, expected 1")
        w, _ = hermitian_eig(a)
        if w[-1] < -PSD_TOL:
            raise ValidationError(f"state is not positive semidefinite (eigenvalue {w[-1]:.3e})")
        self.matrix = _frozen(a)
        self.eigenvalues = w

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __repr__(self):
        return f"DensityOperator(dim={self.dim})"


class Effect:
    """Validated POVM element: Hermitian with spectrum in [0, 1]."""

    def __init__(self, matrix):
        a = as_matrix(matrix)
        _check_hermitian(a)
        w, _ = hermitian_eig(a)
        if w[-1] < -PSD_TOL or w[0] > 1.0 + PSD_TOL:
            raise ValidationError(f"effect spectrum [{w[-1]:.3e}, {w[0]:.3e}] outside [0, 1]")
        self.matrix = _frozen(a)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __repr__(self):
        return f"Effect(dim={self.dim})"


def born_probability(rho: DensityOperator, effect: Effect) -> float:
    """``tr[rho E]``, checked to lie in [0, 1] up to tolerance and then clamped."""
    r = rho.matrix if isinstance(rho, DensityOperator) else as_matrix(rho)
    e = effect.matrix if isinstance(effect, Effect) else as_matrix(effect)
    if r.shape != e.shape:
        raise ValidationError(f"dimension mismatch: state {r.shape} vs effect {e.shape}")
    p = np.einsum("ij,ji->", r, e)
    if abs(p.imag) > PROB_TOL or not (-PROB_TOL <= p.real <= 1.0 + PROB_TOL):
        raise ValidationError(f"Born probability {p!r} outside [0, 1]")
    return min(max(float(p.real), 0.0), 1.0)


def singlet_state() -> DensityOperator:
    """``(|01> - |10>)/sqrt(2)`` as a density operator."""
    psi = np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) / np.sqrt(2.0)
    return DensityOperator(np.outer(psi, psi.conj()))


def maximally_entangled_state(d: int) -> DensityOperator:
    """``sum_k |kk> / sqrt(d)``."""
    psi = np.zeros(d * d, dtype=complex)
    psi[np.arange(d) * (d + 1)] = 1.0 / np.sqrt(d)
    return DensityOperator(np.outer(psi, psi.conj()))


def maximally_mixed_state(d: int) -> DensityOperator:
    return DensityOperator(np.eye(d, dtype=complex) / d)


def spin_projector(direction, outcome: int) -> Effect:
    """Qubit projector ``(I + a x.sigma)/2`` for outcome ``a = +1 / -1``."""
    x = as_direction(direction)
    if outcome not in (1, -1):
        raise ValidationError(f"spin outcome must be +1 or -1, got {outcome!r}")
    xs = x[0] * PAULI_X + x[1] * PAULI_Y + x[2] * PAULI_Z
    return Effect(0.5 * (np.eye(2) + outcome * xs))


@dataclass(frozen=True)
class PovmFamily:
    """Joint POVMs ``E^{xy}_{ab}`` for a list of joint settings.

    ``effects`` maps ``(x, y, a, b)`` to :class:`Effect`, with outcome labels
    ``a in 1..d1`` and ``b in 1..d2``.
    """

    d1: int
    d2: int
    settings: tuple
    effects: Mapping = field(repr=False)

    def __post_init__(self):
        if self.d1 < 1 or self.d2 < 1 or self.d1 * self.d2 > 64:
            raise ValidationError(f"unsupported local dimensions ({self.d1}, {self.d2})")
        settings = tuple(tuple(s) for s in self.settings)
        if len(set(settings)) != len(settings):
            raise ValidationError("duplicate joint settings")
        object.__setattr__(self, "settings", settings)
        d = self.d1 * self.d2
        effects = {}
        for x, y in settings:
            total = np.zeros((d, d), dtype=complex)
            for a in range(1, self.d1 + 1):
                for b in range(1, self.d2 + 1):
                    try:
                        e = self.effects[(x, y, a, b)]
                    except KeyError:
                        raise ValidationError(f"missing effect for setting ({x}, {y}) outcome ({a}, {b})") from None
                    if not isinstance(e, Effect):
                        e = Effect(e)
                    if e.dim != d:
                        raise ValidationError(f"effect ({x}, {y}, {a}, {b}) has dimension {e.dim}, expected {d}")
                    effects[(x, y, a, b)] = e
                    total += e.matrix
            dev = np.max(np.abs(total - np.eye(d)))
            if dev > POVM_SUM_TOL:
                raise ValidationError(f"effects for setting ({x}, {y}) do not sum to identity (max deviation {dev:.3e})")
        object.__setattr__(self, "effects", effects)

    def effect(self, x, y, a: int, b: int) -> Effect:
        return self.effects[(x, y, a, b)]

    @classmethod
    def from_local(cls, x_povms: Mapping, y_povms: Mapping, settings: Sequence | None = None) -> "PovmFamily":
        """Product POVMs ``E^x_a (x) E^y_b`` from per-side lists of effects.

        ``x_povms[x]`` is the list of effects for outcomes ``1..d1``.
        """
        if settings is None:
            settings = [(x, y) for x in x_povms for y in y_povms]
        d1 = len(next(iter(x_povms.values())))
        d2 = len(next(iter(y_povms.values())))
        effects = {}
        for x, y in settings:
            for a, ea in enumerate(x_povms[x], start=1):
                for b, eb in enumerate(y_povms[y], start=1):
                    ma = ea.matrix if isinstance(ea, Effect) else ea
                    mb = eb.matrix if isinstance(eb, Effect) else eb
                    effects[(x, y, a, b)] = Effect(tensor_product(ma, mb))
        return cls(d1, d2, tuple(settings), effects)


def spin_povm_family(x_dirs: Mapping, y_dirs: Mapping, settings: Sequence | None = None) -> PovmFamily:
    """Projective spin measurements on two qubits.

    Outcome label 1 is spin +1 and label 2 is spin -1.
    """
    xp = {k: [spin_projector(v, 1), spin_projector(v, -1)] for k, v in x_dirs.items()}
    yp = {k: [spin_projector(v, 1), spin_projector(v, -1)] for k, v in y_dirs.items()}
    return PovmFamily.from_local(xp, yp, settings)


def basis_povm(unitary) -> list[Effect]:
    """Rank-1 projectors onto the columns of a unitary."""
    u = as_matrix(unitary)
    return [Effect(np.outer(u[:, k], u[:, k].conj())) for k in range(u.shape[1])]
