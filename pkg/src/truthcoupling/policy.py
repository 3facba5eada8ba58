"""Choosing an audit rate that trades truth-coupling against verification cost.

The policy space is reduced to a single audit rate ``q``; the objective is

    J(q) = rho(q, r) - lambda_cost * unit_cost * q.

Under linear shrinkage ``rho`` is S-shaped in ``q`` so ``J`` can have a corner
maximum at 0 and an interior one at the same time. The solver scans a coarse
grid, then polishes the best grid bracket with golden-section search and keeps
whichever of the refined point and the endpoints scores higher.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import MixingMode, truth_coupling
from .errors import DomainError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
TIE_TOL = 1e-12
SNAP_TOL = 1e-6


@dataclass(frozen=True)
class PolicyProblem:
    r: float
    lambda_cost: float
    unit_cost: float = 1.0
    mode: MixingMode = MixingMode.LINEAR_SHRINKAGE

    def __post_init__(self):
        if not (math.isfinite(self.r) and self.r >= 0.0):
            raise DomainError(f"r must be >= 0, got {self.r}")
        if not (math.isfinite(self.lambda_cost) and self.lambda_cost >= 0.0):
            raise DomainError(f"lambda_cost must be >= 0, got {self.lambda_cost}")
        if not (math.isfinite(self.unit_cost) and self.unit_cost > 0.0):
            raise DomainError(f"unit_cost must be > 0, got {self.unit_cost}")
        object.__setattr__(self, "mode", MixingMode.parse(self.mode))

    @property
    def price(self) -> float:
        """Marginal cost of one unit of audit rate."""
        return self.lambda_cost * self.unit_cost


@dataclass(frozen=True)
class PolicySolution:
    q: float
    value: float
    rho: float


def objective(p: PolicyProblem, q: float) -> float:
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"audit rate must lie in [0, 1], got {q}")
    if q == 0.0:
        return truth_coupling(0.0, p.r, p.mode)
    return truth_coupling(q, p.r, p.mode) - p.price * q


def objective_grid(p: PolicyProblem, q: np.ndarray) -> np.ndarray:
    """Vectorized :func:`objective` for grids (used by the scan and by oracles)."""
    u = 1.0 - q
    noise = u * u * p.r if p.mode is MixingMode.LINEAR_SHRINKAGE else u * p.r
    return 1.0 / np.sqrt(1.0 + noise) - p.price * q


def golden_section_max(f, lo: float, hi: float, tol: float = 1e-12, max_iter: int = 200):
    """Maximize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    a, b = lo, hi
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
    if f1 >= f2:
        return x1, f1
    return x2, f2


def optimize_audit_rate(p: PolicyProblem, grid_points: int = 1000) -> PolicySolution:
    """Best audit rate for ``p``; ties within 1e-12 go to the smaller rate."""
    if grid_points < 3:
        raise DomainError(f"grid_points must be >= 3, got {grid_points}")
    grid = np.linspace(0.0, 1.0, grid_points)
    values = objective_grid(p, grid)
    i = int(np.argmax(values))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid_points - 1)]
    q_ref, j_ref = golden_section_max(lambda q: objective(p, q), float(lo), float(hi))
    # rounding flattens J next to q = 1; do not let the tie rule strand q* just below it
    if 1.0 - q_ref < SNAP_TOL and objective(p, 1.0) >= j_ref - TIE_TOL:
        q_ref = 1.0

    candidates = [0.0, q_ref, 1.0]
    scored = [(objective(p, q), q) for q in candidates]
    best = max(v for v, _ in scored)
    q_star = min(q for v, q in scored if v >= best - TIE_TOL)
    value = objective(p, q_star)
    return PolicySolution(q_star, value, truth_coupling(q_star, p.r, p.mode))
