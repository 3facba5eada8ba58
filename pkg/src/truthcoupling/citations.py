"""Citations as a proxy score: coupling, winner's curse, and exchange rates.

A field's normalized citation score ``C = (Y - mu) / s`` follows the same
mixture as venue scores, ``C = T + (1 - q) Delta_C``. With Gaussian ``T`` and
``Delta_C`` the regression of ``T`` on ``C`` is linear with slope ``rho_c**2``,
which gives the winner's curse: a paper scoring ``c`` is expected to be worth
only ``rho_c**2 * c``, the rest being inflation.

The ratio ``r_c`` can be read as a count of independent proxy channels, each
as variable as the signal itself; that reading is informal and has no type of
its own here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .montecarlo import SlopeFit, draw_citation_pairs, ols_slope, top_of_n_selection


@dataclass(frozen=True)
class FieldProfile:
    name: str
    q: float
    r_c: float
    s: float = 1.0
    mu: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise DomainError(f"{self.name}: q must lie in [0, 1], got {self.q}")
        if not (math.isfinite(self.r_c) and self.r_c >= 0.0):
            raise DomainError(f"{self.name}: r_c must be >= 0, got {self.r_c}")
        if not (math.isfinite(self.s) and self.s > 0.0):
            raise DomainError(f"{self.name}: population scale s must be > 0, got {self.s}")
        if not (math.isfinite(self.mu) and self.mu >= 0.0):
            raise DomainError(f"{self.name}: baseline mean mu must be >= 0, got {self.mu}")

    @property
    def K(self) -> float:
        """Effective noise load ``(1 - q)**2 * r_c``."""
        return (1.0 - self.q) ** 2 * self.r_c

    @property
    def rho_c(self) -> float:
        return citation_coupling(self)

    def normalize(self, y: float) -> float:
        return (y - self.mu) / self.s


@dataclass(frozen=True)
class ConditionalValue:
    """Law of latent value given a citation score ``c``."""

    mean: float
    variance: float
    inflation: float


def citation_coupling(f: FieldProfile) -> float:
    return 1.0 / math.sqrt(1.0 + f.K)


def conditional_value_normalized(
    f: FieldProfile, c: float, var_t: float = 1.0
) -> ConditionalValue:
    if not (math.isfinite(var_t) and var_t > 0.0):
        raise DomainError(f"var_t must be > 0, got {var_t}")
    shrink = 1.0 / (1.0 + f.K)  # rho_c**2 without the sqrt round trip
    mean = shrink * c
    return ConditionalValue(mean=mean, variance=var_t * (1.0 - shrink), inflation=c - mean)


def conditional_value_raw(
    f: FieldProfile, y: float, var_t: float = 1.0
) -> ConditionalValue:
    """Conditional law of latent value given a raw citation count ``y``."""
    if f.s <= 0.0:
        raise DomainError(f"population scale s must be > 0, got {f.s}")
    return conditional_value_normalized(f, f.normalize(y), var_t)


def marginal_value_per_citation(f: FieldProfile) -> float:
    """Expected latent value of one extra raw citation, ``rho_c**2 / s``."""
    return 1.0 / ((1.0 + f.K) * f.s)


def exchange_rate(a: FieldProfile, b: FieldProfile) -> float:
    """Citations in field ``a`` worth as much as one citation in field ``b``."""
    return (a.s / b.s) * (1.0 + a.K) / (1.0 + b.K)


@dataclass(frozen=True)
class SelectionCheck:
    fit: SlopeFit
    n_papers: int
    n_trials: int
    expected_slope: float

    @property
    def slope(self) -> float:
        return self.fit.slope

    @property
    def std_err(self) -> float:
        return self.fit.std_err


def regression_slope_check(
    f: FieldProfile, n_samples: int, seed: int, var_t: float = 1.0
) -> SelectionCheck:
    """Regress ``T`` on ``C`` over an unselected joint-Gaussian sample."""
    rng = np.random.default_rng(seed)
    t, c = draw_citation_pairs(f.q, f.r_c, n_samples, rng, var_t)
    return SelectionCheck(ols_slope(c, t), 1, n_samples, f.rho_c**2)


def top_cited_selection_check(
    f: FieldProfile, n_papers: int, n_trials: int, seed: int, var_t: float = 1.0
) -> SelectionCheck:
    """Regress the most cited paper's latent value on its citation score.

    Selecting the top of ``n_papers`` changes the distribution of ``C_max`` but
    not the conditional law of ``T`` given it, so the slope should still
    estimate ``rho_c**2``.
    """
    if n_papers < 2:
        raise DomainError(f"n_papers must be >= 2, got {n_papers}")
    if n_trials < 10_000:
        raise DomainError(f"n_trials must be >= 10000, got {n_trials}")
    t, c = top_of_n_selection(f.q, f.r_c, n_papers, n_trials, seed, var_t)
    return SelectionCheck(ols_slope(c, t), n_papers, n_trials, f.rho_c**2)


def binned_inflation(
    c: np.ndarray, t: np.ndarray, n_bins: int = 10
) -> list[tuple[float, float, float, int]]:
    """Mean score, mean inflation ``C - T`` and its standard error per quantile bin of ``c``."""
    edges = np.quantile(c, np.linspace(0.0, 1.0, n_bins + 1))
    which = np.clip(np.searchsorted(edges, c, side="right") - 1, 0, n_bins - 1)
    rows = []
    for k in range(n_bins):
        mask = which == k
        m = int(mask.sum())
        if m < 2:
            continue
        infl = c[mask] - t[mask]
        rows.append(
            (float(c[mask].mean()), float(infl.mean()), float(infl.std(ddof=1) / math.sqrt(m)), m)
        )
    return rows
