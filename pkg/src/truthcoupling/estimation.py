"""Estimators for the model's drivers from audit, benchmark and venue data.

Audit decomposition treats the audited gain ``Y'`` as exact truth, so
``Var(Y')`` estimates ``Var(T)`` and ``Var(Y - Y')`` estimates ``Var(Delta)``.
Audit noise in ``Y'`` therefore biases ``var_t_hat`` upward and ``r_hat``
downward; no correction is attempted.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .analytic import PressureInputs, verification_rate
from .errors import DegenerateSignalError, DomainError, FormatError, InsufficientDataError

AUDIT_COLUMNS = ("paper_id", "reported_gain", "audited_gain")
HEADROOM_COLUMNS = ("period", "best_metric")
DEFAULT_WINDOW = 3


@dataclass(frozen=True)
class AuditRecord:
    paper_id: str
    reported_gain: float
    audited_gain: float

    def __post_init__(self):
        if not (math.isfinite(self.reported_gain) and math.isfinite(self.audited_gain)):
            raise DomainError(f"audit record {self.paper_id!r} has a non-finite gain")


@dataclass(frozen=True)
class VarianceDecomposition:
    var_delta: float
    var_t: float
    r: float
    n: int


def decompose_variance(records: Sequence[AuditRecord]) -> VarianceDecomposition:
    """Split reported gains into signal and proxy-error variance (unbiased, ddof=1)."""
    n = len(records)
    if n < 3:
        raise InsufficientDataError(f"need at least 3 audit records, got {n}")
    y = np.fromiter((rec.reported_gain for rec in records), float, n)
    y_audit = np.fromiter((rec.audited_gain for rec in records), float, n)
    var_t = float(np.var(y_audit, ddof=1))
    if var_t == 0.0:
        raise DegenerateSignalError("audited gains have zero variance; r is undefined")
    var_delta = float(np.var(y - y_audit, ddof=1))
    return VarianceDecomposition(var_delta, var_t, var_delta / var_t, n)


@dataclass(frozen=True)
class HeadroomSeries:
    periods: tuple[float, ...]
    best_metric: tuple[float, ...]

    def __post_init__(self):
        if len(self.periods) != len(self.best_metric):
            raise FormatError("periods and best_metric differ in length")
        for i, m in enumerate(self.best_metric):
            if not (math.isfinite(m) and 0.0 <= m <= 1.0):
                raise FormatError(f"best_metric must lie in [0, 1], got {m}", row=i + 1)
        for i in range(1, len(self.periods)):
            if not self.periods[i] > self.periods[i - 1]:
                raise FormatError("periods must be strictly increasing", row=i + 1)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> "HeadroomSeries":
        pairs = list(pairs)
        return cls(tuple(float(p) for p, _ in pairs), tuple(float(m) for _, m in pairs))


@dataclass(frozen=True)
class HeadroomStats:
    periods: tuple[float, ...]
    headroom: tuple[float, ...]
    improvements: tuple[float, ...]
    rolling_variance: tuple[float, ...]
    window: int


def headroom_stats(series: HeadroomSeries, window: int = DEFAULT_WINDOW) -> HeadroomStats:
    """Headroom ``1 - M_t``, improvements ``M_t - M_{t-1}``, and their rolling variance.

    The rolling variance (ddof=1) over ``window`` consecutive improvements has
    ``n - window`` entries; a shrinking sequence is the saturation signature.
    """
    if window < 2:
        raise DomainError(f"window must be >= 2, got {window}")
    m = np.asarray(series.best_metric, dtype=float)
    if len(m) < window:
        raise InsufficientDataError(
            f"need at least {window} periods for a rolling variance, got {len(m)}"
        )
    improvements = np.diff(m)
    rolling = [
        float(np.var(improvements[i : i + window], ddof=1))
        for i in range(len(improvements) - window + 1)
    ]
    return HeadroomStats(
        series.periods,
        tuple(float(h) for h in 1.0 - m),
        tuple(float(d) for d in improvements),
        tuple(rolling),
        window,
    )


@dataclass(frozen=True)
class VenueCounts:
    claim_rate: float
    reviewer_hours: float
    mean_check_cost: float
    fidelity: float = 1.0

    def to_pressure_inputs(self) -> PressureInputs:
        return PressureInputs(
            claim_rate=self.claim_rate,
            raw_cost=self.mean_check_cost,
            fidelity=self.fidelity,
            bandwidth=self.reviewer_hours,
        )


def estimate_pressure(v: VenueCounts) -> tuple[float, float]:
    """Plug-in estimates ``(Lambda_hat, q_hat)`` from venue counts."""
    pressure = v.to_pressure_inputs().pressure
    return pressure, verification_rate(pressure)


# -- CSV ingestion ------------------------------------------------------------


def _read_rows(path: str | Path, columns: tuple[str, ...]) -> list[tuple[int, dict[str, str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise FormatError(f"{path}: empty file, expected header {','.join(columns)}")
        header = [name.strip() for name in reader.fieldnames]
        if tuple(header) != columns:
            raise FormatError(
                f"{path}: expected header {','.join(columns)}, got {','.join(header)}", row=1
            )
        rows = []
        # row numbers count the header as row 1
        for lineno, row in enumerate(reader, start=2):
            if None in row or any(v is None for v in row.values()):
                raise FormatError(f"expected {len(columns)} fields", row=lineno)
            rows.append((lineno, {k.strip(): v.strip() for k, v in row.items()}))
    return rows


def _parse_float(text: str, name: str, lineno: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise FormatError(f"{name} is not a number: {text!r}", row=lineno) from None
    if not math.isfinite(value):
        raise FormatError(f"{name} must be finite, got {text!r}", row=lineno)
    return value


def read_audit_csv(path: str | Path) -> list[AuditRecord]:
    """Load ``paper_id,reported_gain,audited_gain`` rows."""
    records = []
    for lineno, row in _read_rows(path, AUDIT_COLUMNS):
        if not row["paper_id"]:
            raise FormatError("empty paper_id", row=lineno)
        records.append(
            AuditRecord(
                row["paper_id"],
                _parse_float(row["reported_gain"], "reported_gain", lineno),
                _parse_float(row["audited_gain"], "audited_gain", lineno),
            )
        )
    return records


def read_headroom_csv(path: str | Path) -> HeadroomSeries:
    pairs = []
    for lineno, row in _read_rows(path, HEADROOM_COLUMNS):
        period = _parse_float(row["period"], "period", lineno)
        metric = _parse_float(row["best_metric"], "best_metric", lineno)
        if not 0.0 <= metric <= 1.0:
            raise FormatError(f"best_metric must lie in [0, 1], got {metric}", row=lineno)
        if pairs and not period > pairs[-1][0]:
            raise FormatError("periods must be strictly increasing", row=lineno)
        pairs.append((period, metric))
    return HeadroomSeries.from_pairs(pairs)


def write_audit_csv(path: str | Path, records: Iterable[AuditRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(AUDIT_COLUMNS)
        for rec in records:
            writer.writerow([rec.paper_id, repr(rec.reported_gain), repr(rec.audited_gain)])


def synthetic_audits(
    n: int, r: float, seed: int, var_t: float = 1.0
) -> list[AuditRecord]:
    """Audit records with known ground truth: ``Y' = T``, ``Y = T + Delta``."""
    rng = np.random.default_rng(seed)
    t = rng.normal(0.0, math.sqrt(var_t), n)
    delta = rng.normal(0.0, math.sqrt(r * var_t), n)
    return [
        AuditRecord(f"p{i:06d}", float(y), float(ya))
        for i, (y, ya) in enumerate(zip(t + delta, t))
    ]
