"""Monte Carlo checks for the closed forms.

Three experiments live here:

* :func:`simulate_coupling` draws ``(T, S)`` from the literal evaluation process
  and estimates ``Corr(S, T)``.
* The best-of-K Goodhart mechanism: proxy gains are Pareto, only the best of
  ``K`` attempts is reported, and ``K`` grows with verification pressure.
* Citation selection: joint-Gaussian ``(T, C)`` cohorts, from which the most
  cited paper is picked.

Replication ``i`` always draws from ``SeedSequence(base_seed, spawn_key=(i,))``
and results are merged in index order, so output does not depend on how many
workers ran the replications.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .analytic import MixingMode, ModelParams
from .errors import DomainError

# keeps (chunk x K) Pareto matrices under ~64 MB
_MAX_CELLS = 1 << 23


def replication_rng(base_seed: int, index: int) -> np.random.Generator:
    """Independent generator for replication ``index`` of a run seeded by ``base_seed``."""
    if base_seed < 0 or index < 0:
        raise DomainError("seeds and replication indices must be non-negative")
    return np.random.default_rng(np.random.SeedSequence(base_seed, spawn_key=(index,)))


@dataclass(frozen=True)
class SimConfig:
    model: ModelParams
    mode: MixingMode = MixingMode.LINEAR_SHRINKAGE
    replications: int = 20
    samples_per_rep: int = 50_000
    base_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.replications < 1:
            raise DomainError(f"replications must be >= 1, got {self.replications}")
        if self.samples_per_rep < 2:
            raise DomainError(f"samples_per_rep must be >= 2, got {self.samples_per_rep}")
        if not 0 <= self.base_seed < 2**64:
            raise DomainError(f"base_seed must be an unsigned 64-bit integer, got {self.base_seed}")
        if self.workers < 1:
            raise DomainError(f"workers must be >= 1, got {self.workers}")
        object.__setattr__(self, "mode", MixingMode.parse(self.mode))


@dataclass(frozen=True)
class CorrEstimate:
    rho_hat: float
    std_err: float
    n_total: int
    per_replication: tuple[float, ...] = field(default=(), repr=False)


@dataclass(frozen=True)
class _Moments:
    """Co-moment summary of a sample, mergeable across replications."""

    n: int
    mean_t: float
    mean_s: float
    m_tt: float
    m_ss: float
    m_ts: float

    @classmethod
    def of(cls, t: np.ndarray, s: np.ndarray) -> "_Moments":
        mt, ms = float(t.mean()), float(s.mean())
        dt, ds = t - mt, s - ms
        return cls(len(t), mt, ms, float(dt @ dt), float(ds @ ds), float(dt @ ds))

    def merge(self, other: "_Moments") -> "_Moments":
        n = self.n + other.n
        dt = other.mean_t - self.mean_t
        ds = other.mean_s - self.mean_s
        w = self.n * other.n / n
        return _Moments(
            n,
            self.mean_t + dt * other.n / n,
            self.mean_s + ds * other.n / n,
            self.m_tt + other.m_tt + dt * dt * w,
            self.m_ss + other.m_ss + ds * ds * w,
            self.m_ts + other.m_ts + dt * ds * w,
        )

    @property
    def corr(self) -> float:
        if self.m_tt == 0.0 or self.m_ss == 0.0:
            raise DomainError("correlation undefined for a constant sample")
        rho = self.m_ts / math.sqrt(self.m_tt * self.m_ss)
        return min(1.0, max(-1.0, rho))


def draw_scores(
    model: ModelParams, mode: MixingMode, n: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``n`` pairs ``(T, S)`` from the evaluation process."""
    t = rng.normal(0.0, math.sqrt(model.var_t), n)
    delta = rng.normal(0.0, math.sqrt(model.var_delta), n)
    if MixingMode.parse(mode) is MixingMode.LINEAR_SHRINKAGE:
        s = t + (1.0 - model.q) * delta
    else:
        verified = rng.random(n) < model.q
        s = np.where(verified, t, t + delta)
    return t, s


def _coupling_replication(cfg: SimConfig, index: int) -> _Moments:
    rng = replication_rng(cfg.base_seed, index)
    t, s = draw_scores(cfg.model, cfg.mode, cfg.samples_per_rep, rng)
    return _Moments.of(t, s)


def simulate_coupling(cfg: SimConfig) -> CorrEstimate:
    """Estimate truth-coupling by simulation.

    The point estimate is the correlation of all pooled samples. The standard
    error is the spread of per-replication correlations over ``sqrt(reps)``;
    with a single replication it falls back to the normal-theory
    ``(1 - rho^2) / sqrt(n)``.
    """
    if cfg.model.var_t <= 0.0:
        raise DomainError("var_t must be > 0")
    indices = range(cfg.replications)
    if cfg.workers > 1 and cfg.replications > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(lambda i: _coupling_replication(cfg, i), indices))
    else:
        parts = [_coupling_replication(cfg, i) for i in indices]

    pooled = parts[0]
    for part in parts[1:]:
        pooled = pooled.merge(part)
    rho = pooled.corr
    per_rep = tuple(p.corr for p in parts)
    if len(per_rep) > 1:
        se = float(np.std(per_rep, ddof=1)) / math.sqrt(len(per_rep))
    else:
        se = (1.0 - rho * rho) / math.sqrt(pooled.n)
    return CorrEstimate(rho, se, pooled.n, per_rep)


# -- best-of-K proxy selection ------------------------------------------------


@dataclass(frozen=True)
class ParetoGaming:
    """Pareto proxy gains and the pressure-driven growth of attempts ``K``."""

    x_min: float = 1.0
    alpha: float = 2.5
    k0: float = 1.0
    beta_growth: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.x_min) and self.x_min > 0.0):
            raise DomainError(f"x_min must be > 0, got {self.x_min}")
        if not (math.isfinite(self.alpha) and self.alpha > 2.0):
            raise DomainError(f"alpha must be > 2 for finite variance, got {self.alpha}")
        if not (math.isfinite(self.k0) and self.k0 >= 1.0):
            raise DomainError(f"k0 must be >= 1, got {self.k0}")
        if not (math.isfinite(self.beta_growth) and self.beta_growth >= 0.0):
            raise DomainError(f"beta_growth must be >= 0, got {self.beta_growth}")

    @property
    def variance(self) -> float:
        """Variance of a single Pareto draw."""
        a = self.alpha
        return self.x_min**2 * a / ((a - 1.0) ** 2 * (a - 2.0))


def _check_attempts(K: float) -> None:
    if not (math.isfinite(K) and K >= 1):
        raise DomainError(f"number of attempts K must be >= 1, got {K}")


def best_of_k_sample(
    g: ParetoGaming, K: int, seed: int | np.random.Generator, size: int = 1
) -> np.ndarray:
    """Draw ``size`` realizations of the best of ``K`` Pareto attempts.

    Each attempt is sampled by inversion, ``x_min * U**(-1/alpha)`` with
    ``U`` uniform on ``(0, 1]``, and the row maximum is kept.
    """
    if int(K) != K:
        raise DomainError(f"sampling needs an integer K, got {K}")
    K = int(K)
    _check_attempts(K)
    if size < 1:
        raise DomainError(f"size must be >= 1, got {size}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    out = np.empty(size)
    chunk = max(1, _MAX_CELLS // K)
    for start in range(0, size, chunk):
        stop = min(size, start + chunk)
        u = 1.0 - rng.random((stop - start, K))
        out[start:stop] = g.x_min * (u.min(axis=1) ** (-1.0 / g.alpha))
    return out


def best_of_k_quantile(g: ParetoGaming, K: float, p: float) -> float:
    """Exact ``p``-quantile of the best of ``K`` attempts (``K`` may be real)."""
    _check_attempts(K)
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    # 1 - p**(1/K) computed without cancellation for large K
    tail = -math.expm1(math.log(p) / K)
    return g.x_min * tail ** (-1.0 / g.alpha)


def best_of_k_median(g: ParetoGaming, K: float) -> float:
    return best_of_k_quantile(g, K, 0.5)


def best_of_k_median_approx(g: ParetoGaming, K: float) -> float:
    """Large-K approximation ``x_min * (K / ln 2)**(1/alpha)``."""
    _check_attempts(K)
    return g.x_min * (K / math.log(2.0)) ** (1.0 / g.alpha)


def attempts_under_pressure(g: ParetoGaming, pressure: float) -> float:
    """Real-valued attempt count ``K0 * exp(beta * max(Lambda - 1, 0))``."""
    if not (math.isfinite(pressure) and pressure > 0.0):
        raise DomainError(f"pressure must be > 0, got {pressure}")
    return g.k0 * math.exp(g.beta_growth * max(pressure - 1.0, 0.0))


def sampling_attempts(g: ParetoGaming, pressure: float) -> int:
    """Attempt count rounded to the nearest integer, at least 1."""
    return max(1, int(round(attempts_under_pressure(g, pressure))))


def pressure_median_approx(g: ParetoGaming, pressure: float) -> float:
    """Exponential-in-pressure approximation to the median of the reported best."""
    if not (math.isfinite(pressure) and pressure > 0.0):
        raise DomainError(f"pressure must be > 0, got {pressure}")
    excess = max(pressure - 1.0, 0.0)
    return (
        g.x_min
        * (g.k0 / math.log(2.0)) ** (1.0 / g.alpha)
        * math.exp(g.beta_growth / g.alpha * excess)
    )


@dataclass(frozen=True)
class NoiseFloor:
    variance: float
    std_err: float
    attempts: int
    n_draws: int


def amplified_noise_floor(
    g: ParetoGaming, pressure: float, n_draws: int, seed: int | np.random.Generator
) -> NoiseFloor:
    """Empirical variance of the centered best-of-K gain at a given pressure.

    This variance is a lower bound on the proxy-error variance contributed by
    selective reporting. ``std_err`` uses the fourth central moment and is only
    meaningful for ``alpha > 4``.
    """
    if n_draws < 1000:
        raise DomainError(f"n_draws must be >= 1000, got {n_draws}")
    K = sampling_attempts(g, pressure)
    x = best_of_k_sample(g, K, seed, n_draws)
    centered = x - x.mean()
    var = float(centered @ centered) / (n_draws - 1)
    m4 = float(np.mean(centered**4))
    se = math.sqrt(max(m4 - var * var, 0.0) / n_draws)
    return NoiseFloor(var, se, K, n_draws)


# -- citation selection -------------------------------------------------------


def draw_citation_pairs(
    q: float,
    r_c: float,
    n: int | tuple[int, ...],
    rng: np.random.Generator,
    var_t: float = 1.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Joint-Gaussian ``(T, C)`` with ``C = T + (1 - q) * Delta_C``."""
    t = rng.normal(0.0, math.sqrt(var_t), n)
    d = rng.normal(0.0, math.sqrt(r_c * var_t), n)
    return t, t + (1.0 - q) * d


def top_of_n_selection(
    q: float,
    r_c: float,
    n_papers: int,
    n_trials: int,
    seed: int,
    var_t: float = 1.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Latent value and score of the most cited paper in each of ``n_trials`` cohorts."""
    if n_papers < 1 or n_trials < 1:
        raise DomainError("n_papers and n_trials must be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(n_papers,)))
    t_sel = np.empty(n_trials)
    c_sel = np.empty(n_trials)
    chunk = max(1, (_MAX_CELLS // 2) // n_papers)
    for start in range(0, n_trials, chunk):
        stop = min(n_trials, start + chunk)
        t, c = draw_citation_pairs(q, r_c, (stop - start, n_papers), rng, var_t)
        idx = c.argmax(axis=1)
        rows = np.arange(stop - start)
        t_sel[start:stop] = t[rows, idx]
        c_sel[start:stop] = c[rows, idx]
    return t_sel, c_sel


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    std_err: float
    residual_sd: float
    n: int


def ols_slope(x: np.ndarray, y: np.ndarray) -> SlopeFit:
    """Least-squares fit ``y ~ intercept + slope * x`` with the slope's standard error."""
    n = len(x)
    if n < 3:
        raise DomainError("need at least 3 points for a slope")
    xm, ym = x.mean(), y.mean()
    dx, dy = x - xm, y - ym
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise DomainError("regressor has zero variance")
    slope = float(dx @ dy) / sxx
    intercept = float(ym - slope * xm)
    resid = dy - slope * dx
    s2 = float(resid @ resid) / (n - 2)
    return SlopeFit(slope, intercept, math.sqrt(s2 / sxx), math.sqrt(s2), n)
