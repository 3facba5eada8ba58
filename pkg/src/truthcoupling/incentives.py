"""Researcher effort allocation under scarce verification.

A researcher splits a unit of effort between truth-oriented work ``e`` and
proxy optimization ``1 - e`` and maximizes

    U(e) = f(e) + (1 - q) * gamma * (1 - e),

with ``f`` increasing and concave. Writing ``x = (1 - q) * gamma`` for the
effective proxy return, the optimum is

* ``e* = 0``  when ``x >= f'(0)``   (incentive collapse),
* ``e* = 1``  when ``x <= f'(1)``,
* otherwise the root of ``f'(e*) = x``.

Two production families are provided. :class:`LogFamily` has a finite
``f'(0)`` so collapse is reachable; :class:`PowerFamily` has ``f'(0) = inf``
so it never collapses while ``q < 1``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Union

from .errors import DomainError


class Regime(str, enum.Enum):
    INTERIOR = "Interior"
    COLLAPSED_AT_ZERO = "CollapsedAtZero"
    SATURATED_AT_ONE = "SaturatedAtOne"


def _check_effort(e: float) -> float:
    e = float(e)
    if not 0.0 <= e <= 1.0:
        raise DomainError(f"effort must lie in [0, 1], got {e}")
    return e


@dataclass(frozen=True)
class LogFamily:
    """``f(e) = a * ln(1 + b e)``; ``f'(0) = a b``."""

    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0.0):
            raise DomainError(f"LogFamily needs a > 0, got {self.a}")
        if not (math.isfinite(self.b) and self.b > 0.0):
            raise DomainError(f"LogFamily needs b > 0, got {self.b}")

    def value(self, e: float) -> float:
        return self.a * math.log1p(self.b * e)

    def marginal(self, e: float) -> float:
        return self.a * self.b / (1.0 + self.b * e)

    def inverse_marginal(self, x: float) -> float:
        """Effort at which the marginal return equals ``x > 0``."""
        return (self.a * self.b / x - 1.0) / self.b


@dataclass(frozen=True)
class PowerFamily:
    """``f(e) = A * e**beta`` with ``0 < beta < 1``; ``f'(0) = +inf``."""

    A: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.A) and self.A > 0.0):
            raise DomainError(f"PowerFamily needs A > 0, got {self.A}")
        if not 0.0 < self.beta < 1.0:
            raise DomainError(f"PowerFamily needs 0 < beta < 1, got {self.beta}")

    def value(self, e: float) -> float:
        return self.A * e**self.beta

    def marginal(self, e: float) -> float:
        if e == 0.0:
            return math.inf
        return self.A * self.beta * e ** (self.beta - 1.0)

    def inverse_marginal(self, x: float) -> float:
        return (x / (self.A * self.beta)) ** (1.0 / (self.beta - 1.0))


Family = Union[LogFamily, PowerFamily]


@dataclass(frozen=True)
class EffortSpec:
    family: Family
    gamma: float
    q: float

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and self.gamma > 0.0):
            raise DomainError(f"gamma must be > 0, got {self.gamma}")
        if not 0.0 <= self.q <= 1.0:
            raise DomainError(f"q must lie in [0, 1], got {self.q}")

    @property
    def proxy_return(self) -> float:
        return (1.0 - self.q) * self.gamma

    def utility(self, e: float) -> float:
        return utility(self.family, self.proxy_return, e)


@dataclass(frozen=True)
class EffortSolution:
    e_star: float
    regime: Regime
    marginal_gap: float


def marginal_return(spec: EffortSpec | Family, e: float) -> float:
    """Derivative ``f'(e)``. Returns ``inf`` for :class:`PowerFamily` at ``e = 0``."""
    family = spec.family if isinstance(spec, EffortSpec) else spec
    return family.marginal(_check_effort(e))


def utility(family: Family, proxy_return: float, e: float) -> float:
    return family.value(e) + proxy_return * (1.0 - e)


def solve_effort(family: Family, proxy_return: float) -> EffortSolution:
    """Optimal effort given the effective proxy return ``x = (1 - q) gamma``."""
    x = float(proxy_return)
    if not (math.isfinite(x) and x >= 0.0):
        raise DomainError(f"proxy return must be finite and >= 0, got {x}")
    f0 = family.marginal(0.0)
    # weak inequality: ties go to the collapsed corner
    if x >= f0:
        return EffortSolution(0.0, Regime.COLLAPSED_AT_ZERO, f0 - x)
    f1 = family.marginal(1.0)
    if x <= f1:
        return EffortSolution(1.0, Regime.SATURATED_AT_ONE, f1 - x)
    e = min(1.0, max(0.0, family.inverse_marginal(x)))
    return EffortSolution(e, Regime.INTERIOR, family.marginal(e) - x)


def optimal_effort(spec: EffortSpec) -> EffortSolution:
    return solve_effort(spec.family, spec.proxy_return)


def collapse_pressure(family: Family, gamma: float) -> float:
    """Smallest pressure ``Lambda >= 1`` at which optimal truth effort collapses.

    With ``q = 1/Lambda`` the collapse condition ``(1 - 1/Lambda) gamma >= f'(0)``
    inverts to ``Lambda* = gamma / (gamma - f'(0))``. Returns ``inf`` when no
    finite pressure suffices.
    """
    gamma = float(gamma)
    if not (math.isfinite(gamma) and gamma > 0.0):
        raise DomainError(f"gamma must be > 0, got {gamma}")
    f0 = family.marginal(0.0)
    if not math.isfinite(f0) or gamma <= f0:
        return math.inf
    return gamma / (gamma - f0)


def effort_curve(
    family: Family, gamma: float, q_grid: Iterable[float]
) -> list[tuple[float, EffortSolution]]:
    """Optimal effort along a grid of verification rates.

    Returns ``(x, solution)`` pairs sorted by increasing proxy return
    ``x = (1 - q) gamma``.
    """
    points = []
    for q in q_grid:
        spec = EffortSpec(family, gamma, float(q))
        points.append((spec.proxy_return, optimal_effort(spec)))
    points.sort(key=lambda item: item[0])
    return points
