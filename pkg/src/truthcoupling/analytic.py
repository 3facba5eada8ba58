"""Closed-form quantities of the mixture evaluation model.

A venue scores each submission either from decisive verification evidence
(probability ``q``) or from a proxy judgment ``T + Delta``. Everything here is a
pure function of a handful of scalars:

* effective verification cost  ``C_eff = c / kappa``
* verification pressure        ``Lambda = R * C_eff / B_eff``
* verification rate            ``q = min(1, 1 / Lambda)``
* noise-to-signal ratio        ``r = Var(Delta) / Var(T)``
* truth-coupling               ``rho = Corr(S, T)``

Two readings of the mixture are supported (see :class:`MixingMode`). The
linear-shrinkage score ``S = T + (1 - q) Delta`` gives
``rho = (1 + (1 - q)^2 r)^(-1/2)``; a literal per-paper coin flip gives
``rho = (1 + (1 - q) r)^(-1/2)`` because only the variance, not the scale, of
the proxy term is thinned.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError


class MixingMode(str, enum.Enum):
    """How the verified and proxy channels combine into the score."""

    LINEAR_SHRINKAGE = "linear"
    BERNOULLI_MIXTURE = "bernoulli"

    @classmethod
    def parse(cls, value: "MixingMode | str") -> "MixingMode":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {
            "linear": cls.LINEAR_SHRINKAGE,
            "linear_shrinkage": cls.LINEAR_SHRINKAGE,
            "linearshrinkage": cls.LINEAR_SHRINKAGE,
            "bernoulli": cls.BERNOULLI_MIXTURE,
            "bernoulli_mixture": cls.BERNOULLI_MIXTURE,
            "bernoullimixture": cls.BERNOULLI_MIXTURE,
        }
        try:
            return aliases[key]
        except KeyError:
            raise DomainError(f"unknown mixing mode {value!r}") from None


def _check_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value}")
    return value


def _check_rate(q: float) -> float:
    q = _check_finite("q", q)
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"verification rate q must lie in [0, 1], got {q}")
    return q


def _check_ratio(r: float) -> float:
    r = _check_finite("r", r)
    if r < 0.0:
        raise DomainError(f"noise-to-signal ratio r must be >= 0, got {r}")
    return r


@dataclass(frozen=True)
class PressureInputs:
    """Venue throughput inputs that determine verification pressure.

    ``claim_rate`` and ``bandwidth`` must share a time unit; ``raw_cost`` and
    ``bandwidth`` must share an effort unit.
    """

    claim_rate: float
    raw_cost: float
    fidelity: float
    bandwidth: float

    def __post_init__(self):
        for name in ("claim_rate", "raw_cost", "bandwidth"):
            value = _check_finite(name, getattr(self, name))
            if value <= 0.0:
                raise DomainError(f"{name} must be > 0, got {value}")
        effective_cost(self.raw_cost, self.fidelity)

    @property
    def effective_cost(self) -> float:
        return effective_cost(self.raw_cost, self.fidelity)

    @property
    def pressure(self) -> float:
        return verification_pressure(self)

    @property
    def q(self) -> float:
        return verification_rate(self.pressure)


@dataclass(frozen=True)
class ModelParams:
    """State of the evaluation mixture: signal variance, proxy variance, rate."""

    var_t: float
    var_delta: float
    q: float

    def __post_init__(self):
        var_t = _check_finite("var_t", self.var_t)
        if var_t <= 0.0:
            raise DomainError(f"var_t must be > 0, got {var_t}")
        var_delta = _check_finite("var_delta", self.var_delta)
        if var_delta < 0.0:
            raise DomainError(f"var_delta must be >= 0, got {var_delta}")
        _check_rate(self.q)

    @classmethod
    def from_ratio(cls, r: float, q: float, var_t: float = 1.0) -> "ModelParams":
        return cls(var_t=var_t, var_delta=_check_ratio(r) * var_t, q=q)

    @classmethod
    def from_pressure(
        cls, var_t: float, var_delta: float, pressure: PressureInputs
    ) -> "ModelParams":
        return cls(var_t=var_t, var_delta=var_delta, q=pressure.q)

    @property
    def r(self) -> float:
        return self.var_delta / self.var_t

    def coupling(self, mode: MixingMode | str = MixingMode.LINEAR_SHRINKAGE) -> float:
        return truth_coupling(self.q, self.r, mode)


def effective_cost(c: float, kappa: float) -> float:
    """Cost of one decisive check, ``c / kappa``."""
    c = _check_finite("c", c)
    kappa = _check_finite("kappa", kappa)
    if c <= 0.0:
        raise DomainError(f"raw cost c must be > 0, got {c}")
    if not 0.0 < kappa <= 1.0:
        raise DomainError(f"fidelity kappa must lie in (0, 1], got {kappa}")
    return c / kappa


def verification_pressure(p: PressureInputs) -> float:
    """Demand for decisive checks relative to bandwidth, ``R * C_eff / B_eff``."""
    return p.claim_rate * effective_cost(p.raw_cost, p.fidelity) / p.bandwidth


def verification_rate(pressure: float) -> float:
    """Probability a claim gets verified under a capacity-limited queue."""
    pressure = _check_finite("pressure", pressure)
    if pressure <= 0.0:
        raise DomainError(f"verification pressure must be > 0, got {pressure}")
    return min(1.0, 1.0 / pressure)


def truth_coupling(
    q: float, r: float, mode: MixingMode | str = MixingMode.LINEAR_SHRINKAGE
) -> float:
    """Correlation between decision score and latent value.

    Parameters
    ----------
    q : float
        Verification rate in ``[0, 1]``.
    r : float
        Noise-to-signal ratio ``Var(Delta) / Var(T)``.
    mode : MixingMode
        ``LINEAR_SHRINKAGE`` scales the proxy error by ``1 - q``;
        ``BERNOULLI_MIXTURE`` drops it entirely with probability ``q``.
    """
    q = _check_rate(q)
    r = _check_ratio(r)
    mode = MixingMode.parse(mode)
    if q == 1.0:
        return 1.0
    u = 1.0 - q
    if mode is MixingMode.LINEAR_SHRINKAGE:
        return 1.0 / math.sqrt(1.0 + u * u * r)
    return 1.0 / math.sqrt(1.0 + u * r)


def coupling_budget(rho_min: float, r: float) -> float:
    """Smallest verification rate that keeps linear-shrinkage coupling >= ``rho_min``.

    Clamped at 0 when the target is already met without any verification.
    """
    rho_min = _check_finite("rho_min", rho_min)
    r = _check_finite("r", r)
    if not 0.0 < rho_min < 1.0:
        raise DomainError(f"rho_min must lie in (0, 1), got {rho_min}")
    if r <= 0.0:
        raise DomainError(f"r must be > 0, got {r}")
    q_min = 1.0 - math.sqrt((rho_min**-2 - 1.0) / r)
    return min(1.0, max(0.0, q_min))


def bandwidth_requirement(q_min: float, claim_rate: float, c_eff: float) -> float:
    """Verification bandwidth needed to sustain rate ``q_min``."""
    q_min = _check_rate(q_min)
    claim_rate = _check_finite("claim_rate", claim_rate)
    c_eff = _check_finite("c_eff", c_eff)
    if claim_rate <= 0.0:
        raise DomainError(f"claim_rate must be > 0, got {claim_rate}")
    if c_eff <= 0.0:
        raise DomainError(f"c_eff must be > 0, got {c_eff}")
    return q_min * claim_rate * c_eff


def contour_ratio(rho: float, pressure: float) -> float:
    """Noise ratio at which linear coupling equals ``rho`` when ``q = 1 / pressure``.

    Only defined above capacity (``pressure > 1``); below it coupling is 1.
    """
    rho = _check_finite("rho", rho)
    pressure = _check_finite("pressure", pressure)
    if not 0.0 < rho < 1.0:
        raise DomainError(f"rho must lie in (0, 1), got {rho}")
    if pressure <= 1.0:
        raise DomainError(f"contours exist only for pressure > 1, got {pressure}")
    u = 1.0 - 1.0 / pressure
    return (rho**-2 - 1.0) / (u * u)
