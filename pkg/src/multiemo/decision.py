"""Decision rules turning score matrices into binary predictions.

Two rules: a global inclusive threshold (cell positive iff score >= tau)
and argmax (exactly one positive per row, lowest column index on ties).
Threshold calibration grid-searches validation data for the tau that
maximizes F1-micro.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .errors import DegenerateInputError, SchemaError
from .metrics import EvaluationReport, evaluate_all, f1_macro, f1_micro
from .validation import check_binary, check_same_shape, check_unit_interval


@dataclass(frozen=True)
class DecisionRule:
    kind: str  # "threshold" or "argmax"
    tau: float | None = None

    def __post_init__(self):
        if self.kind == "threshold":
            if self.tau is None or not 0.0 < self.tau < 1.0:
                raise SchemaError(f"threshold rule needs tau in (0, 1), got {self.tau}")
        elif self.kind == "argmax":
            if self.tau is not None:
                raise SchemaError("argmax rule takes no tau")
        else:
            raise SchemaError(f"unknown decision rule kind {self.kind!r}")


THRESHOLD_DEFAULT = DecisionRule("threshold", 0.5)
ARGMAX = DecisionRule("argmax")


def describe_rule(rule: DecisionRule) -> str:
    if rule.kind == "threshold":
        return f"threshold(tau={rule.tau:g})"
    return "argmax(single-label)"


def decide(scores, rule: DecisionRule) -> np.ndarray:
    """Apply a decision rule; threshold comparison is inclusive (>= tau)."""
    s = check_unit_interval(scores, "scores")
    if rule.kind == "threshold":
        return (s >= rule.tau).astype(np.int8)
    pred = np.zeros_like(s, dtype=np.int8)
    pred[np.arange(s.shape[0]), np.argmax(s, axis=1)] = 1
    return pred


DEFAULT_GRID = tuple(round(0.05 * k, 2) for k in range(1, 20))  # 0.05 .. 0.95


@dataclass(frozen=True)
class CalibrationResult:
    tau: float
    f1_at_tau: float
    f1_at_default: float
    f1_macro_at_tau: float
    f1_macro_at_default: float

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "f1_micro": {"at_tau": self.f1_at_tau, "at_0.5": self.f1_at_default,
                         "delta": self.f1_at_tau - self.f1_at_default},
            "f1_macro": {"at_tau": self.f1_macro_at_tau, "at_0.5": self.f1_macro_at_default,
                         "delta": self.f1_macro_at_tau - self.f1_macro_at_default},
        }


def calibrate_threshold(scores, gold, grid=DEFAULT_GRID) -> CalibrationResult:
    """Pick the grid tau maximizing F1-micro on validation data.

    Ties break toward 0.5, then toward the lower value. Always also
    reports F1 at tau = 0.5 so the improvement delta is available.
    """
    s = check_unit_interval(scores, "scores")
    g = check_binary(gold, "gold")
    check_same_shape(s, g, "scores/gold")
    if g.sum() == 0:
        raise DegenerateInputError("validation gold has no positive cells")
    grid = list(grid)
    if not grid or any(not 0.0 < t < 1.0 for t in grid):
        raise SchemaError("grid must be non-empty with values in (0, 1)")

    scored = []
    for tau in grid:
        pred = decide(s, DecisionRule("threshold", tau))
        scored.append((f1_micro(pred, g), tau))
    best_f1 = max(f for f, _ in scored)
    candidates = [t for f, t in scored if f == best_f1]
    tau_star = min(candidates, key=lambda t: (abs(t - 0.5), t))

    pred_default = decide(s, THRESHOLD_DEFAULT)
    pred_star = decide(s, DecisionRule("threshold", tau_star))
    return CalibrationResult(
        tau=tau_star,
        f1_at_tau=best_f1,
        f1_at_default=f1_micro(pred_default, g),
        f1_macro_at_tau=f1_macro(pred_star, g),
        f1_macro_at_default=f1_macro(pred_default, g),
    )


@dataclass(frozen=True)
class RuleComparison:
    threshold_report: EvaluationReport
    argmax_report: EvaluationReport
    mean_cardinality_threshold: float
    mean_cardinality_argmax: float

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold_report.to_dict(),
            "argmax": self.argmax_report.to_dict(),
            "mean_predicted_cardinality": {
                "threshold": self.mean_cardinality_threshold,
                "argmax": self.mean_cardinality_argmax,
            },
        }


def compare_rules(scores, gold, tau: float = 0.5, groups=None, labels=None) -> RuleComparison:
    """Evaluate under threshold(tau) and argmax side by side.

    The paired reports expose the single-label inflation effect: argmax
    always predicts exactly one label per row, while threshold-free
    metrics are identical across the two rules.
    """
    s = check_unit_interval(scores, "scores")
    rule_t = DecisionRule("threshold", tau)
    report_t = evaluate_all(s, gold, rule_t, groups=groups, labels=labels)
    report_a = evaluate_all(s, gold, ARGMAX, groups=groups, labels=labels)
    card_t = float(decide(s, rule_t).sum(axis=1).mean())
    card_a = float(decide(s, ARGMAX).sum(axis=1).mean())
    return RuleComparison(report_t, report_a, card_t, card_a)


class ThresholdCalibrator(BaseEstimator):
    """sklearn-style estimator: fit learns tau_ on validation data, predict applies it."""

    def __init__(self, grid=DEFAULT_GRID):
        self.grid = grid

    def fit(self, X, y):
        result = calibrate_threshold(X, y, grid=self.grid)
        self.tau_ = result.tau
        self.calibration_ = result
        return self

    def predict(self, X):
        if not hasattr(self, "tau_"):
            raise SchemaError("ThresholdCalibrator is not fitted")
        return decide(X, DecisionRule("threshold", self.tau_))


class ArgmaxClassifier(BaseEstimator):
    """Stateless sklearn-style wrapper for the argmax rule."""

    def fit(self, X=None, y=None):
        return self

    def predict(self, X):
        return decide(X, ARGMAX)
