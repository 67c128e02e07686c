"""Phase-1 simplex for feasibility of ``A q = b, q >= 0``.

Dense tableau with Bland's rule. Sized for the local-polytope problems in
this package (at most a few hundred columns).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-12
MAX_PIVOTS = 100_000


class CyclingError(RuntimeError):
    """Pivot guard exceeded; with Bland's rule this indicates a bug."""


@dataclass(frozen=True)
class Phase1Result:
    """Outcome of the phase-1 problem ``min sum(r)`` s.t. ``A q + r = b``.

    ``dual`` is the optimal dual vector ``y``: it satisfies
    ``y . A[:, j] <= 0`` for every column and ``y . b = value``, so when
    ``value > 0`` it certifies infeasibility.
    """

    value: float
    x: np.ndarray
    dual: np.ndarray
    pivots: int


def dedupe_rows(a: np.ndarray, b: np.ndarray, tol: float = 0.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Drop exactly repeated rows of ``[A | b]``; returns the kept row indices too."""
    ab = np.column_stack([a, b])
    keep = []
    for i, row in enumerate(ab):
        if not any(np.max(np.abs(row - ab[j])) <= tol for j in keep):
            keep.append(i)
    keep = np.array(keep, dtype=int)
    return a[keep], b[keep], keep


def phase1(a, b, max_pivots: int = MAX_PIVOTS) -> Phase1Result:
    """Solve the phase-1 problem for ``A q = b, q >= 0``."""
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    m, n = a.shape
    flip = np.where(b < 0, -1.0, 1.0)
    a *= flip[:, None]
    b *= flip

    # Columns: n structural, m artificial; last column is the RHS.
    t = np.zeros((m, n + m + 1))
    t[:, :n] = a
    t[:, n:n + m] = np.eye(m)
    t[:, -1] = b
    basis = list(range(n, n + m))
    cost = np.zeros(n + m)
    cost[n:] = 1.0
    # Reduced costs: c_j - c_B B^-1 A_j, last entry is -objective.
    red = np.concatenate([cost, [0.0]]) - t.sum(axis=0)

    pivots = 0
    while True:
        entering = next((j for j in range(n + m) if red[j] < -1e-11), None)
        if entering is None:
            break
        col = t[:, entering]
        rows = np.where(col > PIVOT_TOL)[0]
        if rows.size == 0:
            # Phase 1 is bounded below by 0; unreachable.
            raise RuntimeError("phase-1 problem reported unbounded")
        ratios = t[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12]
        leave = min(ties, key=lambda r: basis[r])
        t[leave] /= t[leave, entering]
        for r in range(m):
            if r != leave and t[r, entering] != 0.0:
                t[r] -= t[r, entering] * t[leave]
        red -= red[entering] * t[leave]
        basis[leave] = entering
        pivots += 1
        if pivots > max_pivots:
            raise CyclingError(f"simplex exceeded {max_pivots} pivots")

    x = np.zeros(n + m)
    x[basis] = t[:, -1]
    # Artificial column j has cost 1 and reduced cost 1 - y_j.
    y = (1.0 - red[n:n + m]) * flip
    return Phase1Result(float(-red[-1]), x[:n], y, pivots)
