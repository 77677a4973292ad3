"""Empirical risk and guaranteed-risk bounds for regression.

Given a training MSE, a capacity estimate h, and a sample size n, the
reduced bound on the expected risk is

    bound = mse / (1 - sqrt(g))_+ ,   g = p - p ln p + ln(n) / (2n),  p = h/n

where (x)_+ sends a nonpositive denominator to +infinity (the bound is
"clipped"). The term p ln p is extended continuously to 0 at p = 0. The
bound holds with probability at least 1 - delta where delta = 4 / sqrt(n).

The general form exposes the adjustable constants:

    bound = mse / (1 - c sqrt(eta))_+ ,
    eta   = a1 (h [ln(a2 n / h) + 1] - ln(delta / 4)) / n

With a1 = a2 = c = 1 and delta = 4 / sqrt(n) the two forms coincide
algebraically: h/n [ln(n/h) + 1] + ln(sqrt(n))/n == p - p ln p + ln(n)/(2n).

Capacity at or above the sample size (p >= 1) always clips. For p slightly
above one, g rises above one and the denominator is negative; for much
larger p the formula's value of g would fall again, an algebraic artifact
outside the formula's validity region, so the clip is forced there.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .ioutil import fmt_float, json_float, json_to_float

__all__ = [
    "DeltaRule",
    "BoundConfig",
    "RiskReport",
    "empirical_risk",
    "vc_bound_reduced",
    "vc_bound_general",
    "realized_confidence",
    "RISK_CSV_HEADER",
    "risk_csv_row",
]

# denominators at or below this are treated as effectively zero
EPS_CLIP = 1e-12


class DeltaRule(enum.Enum):
    FIXED = "fixed"
    FOUR_OVER_SQRT_N = "four_over_sqrt_n"


@dataclass(frozen=True)
class BoundConfig:
    """Constants of the general bound. Defaults reproduce the reduced form."""

    a1: float = 1.0
    a2: float = 1.0
    c: float = 1.0
    delta: float | None = None
    delta_rule: DeltaRule = DeltaRule.FOUR_OVER_SQRT_N

    def __post_init__(self):
        if not (self.a1 > 0 and self.a2 > 0 and self.c > 0):
            raise InvalidInputError("a1, a2 and c must be positive")
        if self.delta_rule is DeltaRule.FIXED:
            if self.delta is None or not (0.0 < self.delta < 1.0):
                raise InvalidInputError("FIXED rule requires delta in (0, 1)")

    def realized_delta(self, n: int) -> float:
        if self.delta_rule is DeltaRule.FIXED:
            return float(self.delta)
        return 4.0 / math.sqrt(n)

    def to_json_dict(self) -> dict:
        return {
            "a1": json_float(self.a1),
            "a2": json_float(self.a2),
            "c": json_float(self.c),
            "delta": None if self.delta is None else json_float(self.delta),
            "delta_rule": self.delta_rule.value,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "BoundConfig":
        delta = d.get("delta")
        return cls(
            a1=json_to_float(d.get("a1", 1.0)),
            a2=json_to_float(d.get("a2", 1.0)),
            c=json_to_float(d.get("c", 1.0)),
            delta=None if delta is None else json_to_float(delta),
            delta_rule=DeltaRule(d.get("delta_rule", "four_over_sqrt_n")),
        )


@dataclass(frozen=True)
class RiskReport:
    """Empirical risk together with its capacity-penalised guarantee."""

    empirical_risk: float
    h: float
    n: int
    p: float
    delta: float
    bound: float
    clipped: bool
    eta_negative: bool = False  # general form only: penalty argument went negative

    def to_json_dict(self) -> dict:
        return {
            "empirical_risk": json_float(self.empirical_risk),
            "h": json_float(self.h),
            "n": self.n,
            "p": json_float(self.p),
            "delta": json_float(self.delta),
            "bound": json_float(self.bound),
            "clipped": self.clipped,
            "eta_negative": self.eta_negative,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "RiskReport":
        return cls(
            empirical_risk=json_to_float(d["empirical_risk"]),
            h=json_to_float(d["h"]),
            n=int(d["n"]),
            p=json_to_float(d["p"]),
            delta=json_to_float(d["delta"]),
            bound=json_to_float(d["bound"]),
            clipped=bool(d["clipped"]),
            eta_negative=bool(d.get("eta_negative", False)),
        )


RISK_CSV_HEADER = "kernel,n,h,p,delta,emp_risk,bound,clipped"


def risk_csv_row(kernel_label: str, report: RiskReport) -> str:
    """One CSV row in the ``kernel,n,h,p,delta,emp_risk,bound,clipped`` format."""
    return ",".join(
        [
            kernel_label,
            str(report.n),
            fmt_float(report.h),
            fmt_float(report.p),
            fmt_float(report.delta),
            fmt_float(report.empirical_risk),
            fmt_float(report.bound),
            "true" if report.clipped else "false",
        ]
    )


def empirical_risk(targets, predictions) -> float:
    """Mean squared error between targets and predictions."""
    targets = np.asarray(targets, dtype=float)
    predictions = np.asarray(predictions, dtype=float)
    if targets.shape != predictions.shape or targets.size == 0:
        raise InvalidInputError("targets and predictions must have equal nonzero length")
    residuals = targets - predictions
    return float(np.mean(residuals**2))


def _validate_bound_inputs(mse: float, h: float, n: int) -> None:
    if n < 1:
        raise InvalidInputError("sample size must be at least 1")
    if h < 0:
        raise InvalidInputError("capacity must be nonnegative")
    if mse < 0:
        raise InvalidInputError("empirical risk must be nonnegative")


def _penalty_argument(p: float, n: int) -> float:
    """g = p - p ln p + ln(n)/(2n), with p ln p := 0 at p = 0."""
    plogp = 0.0 if p == 0.0 else p * math.log(p)
    return p - plogp + math.log(n) / (2.0 * n)


def vc_bound_reduced(mse: float, h: float, n: int) -> RiskReport:
    """Reduced guaranteed-risk bound at confidence delta = 4 / sqrt(n)."""
    _validate_bound_inputs(mse, h, n)
    p = h / n
    delta = 4.0 / math.sqrt(n)
    if p >= 1.0:
        return RiskReport(mse, h, n, p, delta, math.inf, clipped=True)
    g = _penalty_argument(p, n)
    denom = 1.0 - math.sqrt(g)
    if denom <= EPS_CLIP:
        return RiskReport(mse, h, n, p, delta, math.inf, clipped=True)
    return RiskReport(mse, h, n, p, delta, mse / denom, clipped=False)


def vc_bound_general(mse: float, h: float, n: int, cfg: BoundConfig) -> RiskReport:
    """General guaranteed-risk bound with adjustable constants.

    If the penalty argument eta comes out negative (possible for extreme
    delta and capacity combinations) the report carries bound = +inf and the
    eta_negative flag instead of raising.
    """
    _validate_bound_inputs(mse, h, n)
    p = h / n
    delta = cfg.realized_delta(n)
    # log in separated form: a2*n/h overflows for subnormal h
    capacity_term = (
        0.0 if h == 0.0
        else h * (math.log(cfg.a2) + math.log(n) - math.log(h) + 1.0)
    )
    eta = cfg.a1 * (capacity_term - math.log(delta / 4.0)) / n
    if eta < 0.0:
        return RiskReport(mse, h, n, p, delta, math.inf, clipped=True, eta_negative=True)
    denom = 1.0 - cfg.c * math.sqrt(eta)
    if denom <= EPS_CLIP:
        return RiskReport(mse, h, n, p, delta, math.inf, clipped=True)
    return RiskReport(mse, h, n, p, delta, mse / denom, clipped=False)


def realized_confidence(n: int) -> float:
    """Confidence level 1 - 4/sqrt(n) at which the reduced bound holds."""
    if n <= 16:
        raise InvalidInputError(
            f"confidence undefined for n = {n}: 1 - 4/sqrt(n) is nonpositive"
        )
    return 1.0 - 4.0 / math.sqrt(n)
