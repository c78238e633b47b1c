"""Apply fitted subset models to raw scores and measure their error.

The prediction path is the full chain raw score -> normalized score ->
log score -> linear model -> inverse transform, so callers hand in raw
game scores and read off a summary estimate in normalized-score units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .data import NormalizationTable, canonical_key, inverse_log_transform, \
    log_transform
from .errors import EnvironmentLookupError, UndefinedRelativeError, \
    ValidationError
from .linreg import LinearModel, predict_linear

TRUE_VALUE_FLOOR = 1e-9


@dataclass(frozen=True)
class PredictionReport:
    """One algorithm's predicted (and optionally true) summary score.

    ``relative_error`` is the signed fraction (predicted - true) / true;
    it is present exactly when a usable true summary is. Values are in
    normalized-score units.
    """

    algorithm_id: str
    predicted_summary: float
    true_summary: float | None = None
    relative_error: float | None = None
    inputs_used: dict[str, float] | None = None

    @property
    def abs_relative_error(self) -> float | None:
        if self.relative_error is None:
            return None
        return abs(self.relative_error)


def predict_summary(model: LinearModel, raw_scores, norms: NormalizationTable
                    ) -> float:
    """Predict a summary score from raw per-environment scores.

    ``raw_scores`` maps environment name -> raw score and must cover the
    model's environments (names matched case/punctuation-insensitively).
    The result is >= -1 always; for a no-intercept model with non-negative
    coefficients it is >= 0, and all-random inputs give exactly 0.
    """
    by_key = {canonical_key(str(k)): float(v) for k, v in raw_scores.items()}
    log_scores = {}
    for env in model.environment_ids:
        key = canonical_key(env)
        if key not in by_key:
            raise EnvironmentLookupError(
                env, f"missing raw score for environment {env!r}")
        entry = norms.lookup(env)
        z = (by_key[key] - entry.random) / (entry.human - entry.random) * 100.0
        log_scores[env] = float(log_transform(z))
    return float(inverse_log_transform(predict_linear(model, log_scores)))


def relative_error(true_value: float, predicted: float) -> float:
    """Signed fraction (predicted - true) / true.

    Positive means over-prediction. The absolute variant is just
    ``abs(...)`` of this; the sign is kept because bias analyses need it.
    """
    if abs(true_value) <= TRUE_VALUE_FLOOR:
        raise UndefinedRelativeError(
            f"relative error undefined for near-zero true value {true_value!r}")
    return (predicted - true_value) / true_value


def approx_relative_error_from_log_mae(mae_log: float,
                                       log_base: float = 10.0) -> float:
    """Expected relative error implied by a mean absolute log residual.

    A residual of d in base-b log space corresponds to a relative error of
    roughly ln(b) * d when residuals are small, so a model's mean absolute
    error in log space converts directly to an expected relative error.
    """
    if mae_log < 0:
        raise ValidationError("mean absolute log error cannot be negative")
    if log_base <= 1:
        raise ValidationError("log base must exceed 1")
    return math.log(log_base) * mae_log


def inversion_count(order_a, order_b) -> int:
    """Number of item pairs ranked in opposite order by the two rankings."""
    order_a = list(order_a)
    order_b = list(order_b)
    if len(set(order_a)) != len(order_a) or len(set(order_b)) != len(order_b):
        raise ValidationError("rankings must not repeat items")
    if set(order_a) != set(order_b):
        raise ValidationError("rankings must cover the same items")
    position_b = {item: i for i, item in enumerate(order_b)}
    sequence = [position_b[item] for item in order_a]
    inversions = 0
    for i in range(len(sequence)):
        for j in range(i + 1, len(sequence)):
            if sequence[i] > sequence[j]:
                inversions += 1
    return inversions


def make_report(algorithm_id: str, predicted: float,
                true_summary: float | None = None,
                inputs_used: dict[str, float] | None = None
                ) -> PredictionReport:
    """Assemble a report, attaching relative error when it is defined."""
    rel = None
    if true_summary is not None and abs(true_summary) > TRUE_VALUE_FLOOR:
        rel = relative_error(true_summary, predicted)
    return PredictionReport(
        algorithm_id=algorithm_id,
        predicted_summary=predicted,
        true_summary=true_summary,
        relative_error=rel,
        inputs_used=dict(inputs_used) if inputs_used else None,
    )


def rebase_scores(reports, baseline_algorithm: str) -> list[PredictionReport]:
    """Express every summary as a ratio to one baseline algorithm's.

    Both the true and the predicted summaries divide by the baseline's
    respective values, so the baseline itself maps to (1.0, 1.0); relative
    errors are recomputed on the rebased values.
    """
    reports = list(reports)
    baseline = next((r for r in reports
                     if r.algorithm_id == baseline_algorithm), None)
    if baseline is None:
        raise ValidationError(
            f"baseline algorithm {baseline_algorithm!r} not in reports")
    if baseline.true_summary is None:
        raise ValidationError("baseline has no true summary to rebase against")
    if (abs(baseline.true_summary) <= TRUE_VALUE_FLOOR
            or abs(baseline.predicted_summary) <= TRUE_VALUE_FLOOR):
        raise ValidationError("baseline summaries must be nonzero to rebase")
    rebased = []
    for report in reports:
        predicted = report.predicted_summary / baseline.predicted_summary
        true = (None if report.true_summary is None
                else report.true_summary / baseline.true_summary)
        rel = None
        if true is not None and abs(true) > TRUE_VALUE_FLOOR:
            rel = relative_error(true, predicted)
        rebased.append(replace(report, predicted_summary=predicted,
                               true_summary=true, relative_error=rel))
    return rebased
