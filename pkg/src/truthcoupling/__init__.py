"""Quantitative model of truth-coupling in peer review.

Closed forms live in :mod:`analytic`, :mod:`incentives` and :mod:`citations`;
:mod:`montecarlo` checks them by simulation; :mod:`estimation` and
:mod:`policy` turn the model into estimators and an audit-rate optimizer.
"""

from .analytic import (
    MixingMode,
    ModelParams,
    PressureInputs,
    bandwidth_requirement,
    contour_ratio,
    coupling_budget,
    effective_cost,
    truth_coupling,
    verification_pressure,
    verification_rate,
)
from .citations import FieldProfile, exchange_rate
from .errors import (
    DegenerateSignalError,
    DomainError,
    FormatError,
    InsufficientDataError,
    ModelError,
)
from .incentives import EffortSpec, LogFamily, PowerFamily, Regime, optimal_effort
from .montecarlo import ParetoGaming, SimConfig, simulate_coupling
from .policy import PolicyProblem, optimize_audit_rate

__version__ = "0.1.0"
