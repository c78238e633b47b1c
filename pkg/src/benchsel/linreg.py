"""Small dense least-squares core used by every subset fit.

Designs here are tiny (at most 16 columns, a few hundred rows) but get
solved millions of times during an exhaustive search, so the solver works
on the normal equations with a hand-rolled Cholesky factorization that is

  * batched: one call factors a whole stack of candidate systems, and
  * pivot-aware: a pivot below 1e-10 of the largest Gram diagonal flags
    that system as rank-deficient instead of raising mid-stack.

The same factorization backs the unconstrained fit, the non-negative
(active set) fit and k-fold cross-validation.
"""

from __future__ import annotations

import json
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .data import canonical_key
from .errors import EnvironmentLookupError, SingularMatrixError, ValidationError

MAX_COLUMNS = 16
PIVOT_RTOL = 1e-10

MODEL_FORMAT = "benchsel-model/1"


@dataclass(frozen=True)
class FitStats:
    """Quality numbers attached to a fitted model (None = not computed)."""

    r_squared: float | None = None
    cv_mse: float | None = None
    log_mae: float | None = None


@dataclass(frozen=True)
class LinearModel:
    """An environment subset with per-environment weights.

    Predictions are ``intercept + coefficients . x`` over log-normalized
    scores; ``intercept`` is None for models fitted without one.
    """

    environment_ids: tuple[str, ...]
    coefficients: np.ndarray
    intercept: float | None = None
    stats: FitStats = field(default_factory=FitStats)
    constrained_nonnegative: bool = False

    def __post_init__(self):
        coef = np.asarray(self.coefficients, dtype=np.float64)
        object.__setattr__(self, "coefficients", coef)
        if coef.shape != (len(self.environment_ids),):
            raise ValidationError("one coefficient per environment required")
        if not np.isfinite(coef).all():
            raise ValidationError("coefficients must be finite")
        if self.constrained_nonnegative and (coef < 0).any():
            raise ValidationError("constrained model has a negative coefficient")
        if self.stats.r_squared is not None and self.stats.r_squared > 1.0:
            raise ValidationError("r_squared cannot exceed 1")
        coef.flags.writeable = False

    @property
    def n_environments(self) -> int:
        return len(self.environment_ids)


def _chol_factor_batched(G: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cholesky-factor a stack of symmetric PSD matrices.

    Parameters
    ----------
    G : ndarray, shape (..., C, C)
        Normal matrices. Assumed symmetric; only the lower triangle is read.

    Returns
    -------
    L : ndarray, shape (..., C, C)
        Lower-triangular factors. Rows flagged in ``bad`` contain garbage.
    bad : ndarray, shape (...,)
        Index of the first column whose pivot fell at or below
        ``PIVOT_RTOL`` times the largest diagonal of its G, else -1.
    """
    G = np.asarray(G, dtype=np.float64)
    C = G.shape[-1]
    L = np.zeros_like(G)
    diag = np.einsum("...ii->...i", G)
    thresh = PIVOT_RTOL * diag.max(axis=-1)
    bad = np.full(G.shape[:-2], -1, dtype=np.int64)
    for j in range(C):
        pivot = G[..., j, j] - np.einsum(
            "...k,...k->...", L[..., j, :j], L[..., j, :j])
        newly_bad = (pivot <= thresh) & (bad == -1)
        bad = np.where(newly_bad, j, bad)
        root = np.sqrt(np.where(pivot > thresh, pivot, 1.0))
        L[..., j, j] = root
        if j + 1 < C:
            s = G[..., j + 1:, j] - np.einsum(
                "...ik,...k->...i", L[..., j + 1:, :j], L[..., j, :j])
            L[..., j + 1:, j] = s / root[..., None]
    return L, bad


def _chol_solve_batched(G: np.ndarray, b: np.ndarray
                        ) -> tuple[np.ndarray, np.ndarray]:
    """Solve a stack of SPD systems G x = b; returns (x, bad) as above."""
    L, bad = _chol_factor_batched(G)
    C = G.shape[-1]
    y = np.zeros_like(b)
    for j in range(C):
        y[..., j] = (b[..., j] - np.einsum(
            "...k,...k->...", L[..., j, :j], y[..., :j])) / L[..., j, j]
    x = np.zeros_like(b)
    for j in reversed(range(C)):
        x[..., j] = (y[..., j] - np.einsum(
            "...k,...k->...", L[..., j + 1:, j], x[..., j + 1:])) / L[..., j, j]
    return x, bad


def _column_name(j: int, n_envs: int, environment_ids) -> str:
    if j >= n_envs:
        return "intercept"
    if environment_ids is not None:
        return str(environment_ids[j])
    return f"column {j}"


def _as_design(X, t, with_intercept: bool):
    X = np.asarray(X, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    if X.ndim != 2:
        raise ValidationError("design matrix must be 2-d")
    rows, cols = X.shape
    if cols < 1:
        raise ValidationError("design matrix needs at least one column")
    if t.shape != (rows,):
        raise ValidationError(f"target has {t.shape} entries for {rows} rows")
    if cols > MAX_COLUMNS:
        raise ValidationError(f"at most {MAX_COLUMNS} columns supported, got {cols}")
    if rows <= cols + int(with_intercept):
        raise ValidationError(
            f"need more rows ({rows}) than fitted parameters "
            f"({cols + int(with_intercept)})")
    return X, t


def _solve_normal_equations(X, t, with_intercept, environment_ids):
    Xa = np.hstack([X, np.ones((X.shape[0], 1))]) if with_intercept else X
    G = Xa.T @ Xa
    rhs = Xa.T @ t
    beta, bad = _chol_solve_batched(G, rhs)
    if bad != -1:
        raise SingularMatrixError(
            _column_name(int(bad), X.shape[1], environment_ids))
    if with_intercept:
        return beta[:-1], float(beta[-1])
    return beta, None


def _r2(predictions: np.ndarray, t: np.ndarray) -> float:
    ss_res = float(((t - predictions) ** 2).sum())
    ss_tot = float(((t - t.mean()) ** 2).sum())
    if ss_tot == 0.0:
        return 0.0
    return 1.0 - ss_res / ss_tot


def _default_ids(cols: int, environment_ids) -> tuple[str, ...]:
    if environment_ids is None:
        return tuple(f"x{j}" for j in range(cols))
    ids = tuple(str(e) for e in environment_ids)
    if len(ids) != cols:
        raise ValidationError("environment_ids length mismatch with design")
    return ids


def fit_ols(X, t, with_intercept: bool = False,
            environment_ids: Sequence[str] | None = None) -> LinearModel:
    """Ordinary least squares via the normal equations.

    ``with_intercept=False`` forces the constant term to 0 (a zero input
    vector then predicts 0). The reported r_squared is in-sample and always
    taken about the mean of ``t``, whatever the intercept mode, so values
    stay comparable across modes.
    """
    X, t = _as_design(X, t, with_intercept)
    coef, intercept = _solve_normal_equations(X, t, with_intercept,
                                              environment_ids)
    predictions = X @ coef + (intercept or 0.0)
    return LinearModel(
        environment_ids=_default_ids(X.shape[1], environment_ids),
        coefficients=coef,
        intercept=intercept,
        stats=FitStats(r_squared=_r2(predictions, t),
                       log_mae=float(np.abs(t - predictions).mean())),
    )


def _nnls_active_set(A: np.ndarray, y: np.ndarray, environment_ids) -> np.ndarray:
    """Lawson-Hanson non-negative least squares on the normal equations."""
    m, n = A.shape
    G = A.T @ A
    rhs = A.T @ y
    x = np.zeros(n)
    passive = np.zeros(n, dtype=bool)
    w = rhs - G @ x
    tol = 1e-10 * max(1.0, float(np.abs(rhs).max(initial=0.0)))
    converged = False
    for _ in range(3 * max(n, 1) + 10):
        inactive = ~passive
        if not inactive.any() or float(w[inactive].max()) <= tol:
            converged = True
            break
        candidates = np.flatnonzero(inactive)
        passive[candidates[int(np.argmax(w[candidates]))]] = True
        while True:
            idx = np.flatnonzero(passive)
            sub, bad = _chol_solve_batched(G[np.ix_(idx, idx)], rhs[idx])
            if bad != -1:
                raise SingularMatrixError(
                    _column_name(int(idx[int(bad)]), n, environment_ids))
            s = np.zeros(n)
            s[idx] = sub
            if sub.min() > 0.0:
                x = s
                break
            # Step from x toward s until the first passive coefficient
            # hits zero, then retire it from the passive set.
            blocking = passive & (s <= 0.0) & (x - s > 0.0)
            if not blocking.any():
                x = np.maximum(s, 0.0)
                passive &= x > 0.0
                break
            alpha = float((x[blocking] / (x[blocking] - s[blocking])).min())
            x = x + alpha * (s - x)
            # The blocking coordinate lands at 0 up to rounding; retire it.
            retired = passive & (x <= 1e-12 * max(1.0, float(np.abs(x).max())))
            x[retired] = 0.0
            passive &= ~retired
        w = rhs - G @ x
    else:
        inactive = ~passive
        converged = (not inactive.any()
                     or float(w[inactive].max()) <= tol)
    if not converged:
        raise ValidationError("non-negative least squares failed to "
                              "converge; the design is likely degenerate")
    return x


def fit_nnls(X, t, with_intercept: bool = False,
             environment_ids: Sequence[str] | None = None) -> LinearModel:
    """Least squares with every coefficient constrained to be >= 0.

    Non-negative weights buy an ordering guarantee that unconstrained fits
    cannot: no score built from a strict subset can be *strictly* order
    preserving (two algorithms may differ only on a game the subset never
    sees), but a non-negative combination of monotonically transformed
    scores is weakly order preserving -- an algorithm that dominates
    another on every environment never ranks below it. Unconstrained
    fits trade that guarantee for accuracy; this one keeps it.

    The intercept, when requested, stays unconstrained: it is profiled out
    by centering the design and target, which leaves an equivalent pure
    NNLS problem in the coefficients.
    """
    X, t = _as_design(X, t, with_intercept)
    if with_intercept:
        col_means = X.mean(axis=0)
        coef = _nnls_active_set(X - col_means, t - t.mean(), environment_ids)
        intercept = float(t.mean() - col_means @ coef)
    else:
        coef = _nnls_active_set(X, t, environment_ids)
        intercept = None
    predictions = X @ coef + (intercept or 0.0)
    return LinearModel(
        environment_ids=_default_ids(X.shape[1], environment_ids),
        coefficients=coef,
        intercept=intercept,
        stats=FitStats(r_squared=_r2(predictions, t),
                       log_mae=float(np.abs(t - predictions).mean())),
        constrained_nonnegative=True,
    )


def r_squared(model: LinearModel, X, t) -> float:
    """1 - SS_res/SS_tot with SS_tot about mean(t); 0 when SS_tot is 0."""
    X = np.asarray(X, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    if X.shape != (len(t), model.n_environments):
        raise ValidationError("design shape inconsistent with model/target")
    predictions = X @ model.coefficients + (model.intercept or 0.0)
    return _r2(predictions, t)


def fold_assignment(rows: int, folds: int, seed: int) -> np.ndarray:
    """Deterministic fold id per row.

    Rows are shuffled by a PCG64 permutation seeded with ``seed`` and cut
    into ``folds`` contiguous chunks; the first ``rows % folds`` chunks take
    the extra row. The returned array maps original row index -> fold id.
    """
    perm = np.random.default_rng(seed).permutation(rows)
    base, extra = divmod(rows, folds)
    sizes = np.full(folds, base, dtype=np.int64)
    sizes[:extra] += 1
    fold_of_row = np.empty(rows, dtype=np.int64)
    fold_of_row[perm] = np.repeat(np.arange(folds), sizes)
    return fold_of_row


def cross_validated_mse(X, t, folds: int, seed: int,
                        with_intercept: bool = False,
                        environment_ids: Sequence[str] | None = None) -> float:
    """Mean over folds of held-out mean squared error.

    A pure function of (X, t, folds, seed, with_intercept): the same seed
    gives a bit-identical result. Raises SingularMatrixError if any
    training fold is rank-deficient.
    """
    X, t = _as_design(X, t, with_intercept)
    if folds < 2:
        raise ValidationError("folds must be >= 2")
    rows = X.shape[0]
    if rows < folds:
        raise ValidationError(f"need at least {folds} rows for {folds}-fold CV")
    fold_of_row = fold_assignment(rows, folds, seed)
    total = 0.0
    for f in range(folds):
        test = fold_of_row == f
        train = ~test
        coef, intercept = _solve_normal_equations(
            X[train], t[train], with_intercept, environment_ids)
        residual = X[test] @ coef + (intercept or 0.0) - t[test]
        total += float((residual ** 2).mean())
    return total / folds


def predict_linear(model: LinearModel, x) -> float:
    """Evaluate ``intercept + sum(coefficients * x)`` in log-score units.

    ``x`` is either a mapping from environment name (matched
    case/punctuation-insensitively) to log score, or a sequence already
    aligned with ``model.environment_ids``.
    """
    if isinstance(x, Mapping):
        by_key = {canonical_key(str(k)): float(v) for k, v in x.items()}
        values = []
        for env in model.environment_ids:
            key = canonical_key(env)
            if key not in by_key:
                raise EnvironmentLookupError(
                    env, f"missing log score for environment {env!r}")
            values.append(by_key[key])
        vec = np.array(values)
    else:
        vec = np.asarray(x, dtype=np.float64)
        if vec.shape != (model.n_environments,):
            raise ValidationError(
                f"expected {model.n_environments} log scores, got {vec.shape}")
    return float((model.intercept or 0.0) + model.coefficients @ vec)


def model_to_dict(model: LinearModel, *, name: str | None = None,
                  norms_checksum: str | None = None,
                  extra: dict | None = None) -> dict:
    """Serializable form of a model, numbers at full decimal precision."""
    doc = {
        "format": MODEL_FORMAT,
        "name": name,
        "environment_ids": list(model.environment_ids),
        "coefficients": [float(c) for c in model.coefficients],
        "intercept": None if model.intercept is None else float(model.intercept),
        "constrained_nonnegative": bool(model.constrained_nonnegative),
        "stats": {
            "r_squared": model.stats.r_squared,
            "cv_mse": model.stats.cv_mse,
            "log_mae": model.stats.log_mae,
        },
        "norms_checksum": norms_checksum,
    }
    if extra:
        doc.update(extra)
    return doc


def model_from_dict(doc: Mapping) -> LinearModel:
    if doc.get("format") != MODEL_FORMAT:
        raise ValidationError(f"not a model document (format="
                              f"{doc.get('format')!r})")
    stats = doc.get("stats") or {}
    return LinearModel(
        environment_ids=tuple(doc["environment_ids"]),
        coefficients=np.array(doc["coefficients"], dtype=np.float64),
        intercept=(None if doc.get("intercept") is None
                   else float(doc["intercept"])),
        stats=FitStats(r_squared=stats.get("r_squared"),
                       cv_mse=stats.get("cv_mse"),
                       log_mae=stats.get("log_mae")),
        constrained_nonnegative=bool(doc.get("constrained_nonnegative", False)),
    )


def save_model(path, model: LinearModel, *, name: str | None = None,
               norms_checksum: str | None = None,
               extra: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model, name=name, norms_checksum=norms_checksum,
                                extra=extra), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path) -> tuple[LinearModel, dict]:
    """Read a model file; returns (model, full document) so callers can
    check the embedded norms checksum."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return model_from_dict(doc), doc
