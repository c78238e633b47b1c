"""Exhaustive environment-subset search scored by cross-validated regression.

Candidate subsets are enumerated in colexicographic order through the
combinatorial number system, so a block of candidates is fully determined
by a rank interval [start, stop). Workers receive rank intervals, unrank
them to index arrays, and score a whole block at once with stacked
normal-equation solves; the final merge uses the total order
(cv_mse, sorted environment names), which makes the ranking bit-identical
whatever the worker count.

Per subset, any algorithm missing one of the required scores is dropped
for that candidate only. Candidates left with fewer usable algorithms
than ``fitted columns + 2`` (or than the fold count, which k-fold CV
needs) are skipped and counted, never silently dropped.
"""

from __future__ import annotations

import math
import multiprocessing
import os
import sys
from dataclasses import dataclass, field, replace

import numpy as np

from .data import PreparedDataset, canonical_key
from .errors import (
    EmptySearchError,
    EnvironmentLookupError,
    SingularMatrixError,
    ValidationError,
)
from .linreg import (
    FitStats,
    LinearModel,
    _chol_solve_batched,
    fit_ols,
    fold_assignment,
)

MAX_ENUMERATION = 1 << 50
PIPELINE_MIN_ENVIRONMENTS = 15
PROGRESS_STRIDE = 1_000_000


@dataclass(frozen=True)
class SearchConfig:
    """Parameters of one exhaustive subset search."""

    subset_size: int
    must_include: tuple[str, ...] = ()
    exclude: tuple[str, ...] = ()
    folds: int = 10
    seed: int = 0
    with_intercept: bool = False
    top_k: int = 100

    def __post_init__(self):
        if self.subset_size < 1:
            raise ValidationError("subset_size must be >= 1")
        if self.folds < 2:
            raise ValidationError("folds must be >= 2")
        if self.top_k < 1:
            raise ValidationError("top_k must be >= 1")
        must = {canonical_key(e) for e in self.must_include}
        if len(must) != len(self.must_include):
            raise ValidationError("duplicate environment in must_include")
        if must & {canonical_key(e) for e in self.exclude}:
            raise ValidationError("must_include and exclude overlap")
        if len(self.must_include) > self.subset_size:
            raise ValidationError("must_include larger than subset_size")


@dataclass(frozen=True)
class RankedCandidate:
    """One scored subset: environments in dataset column order."""

    subset: tuple[str, ...]
    model: LinearModel
    cv_mse: float
    n_algorithms_used: int


@dataclass(frozen=True)
class SearchResult:
    """Ranked outcome of an exhaustive search plus skip accounting.

    ``ranked`` is sorted ascending by cv_mse with ties broken by the
    lexicographic order of the sorted environment names, so the ordering
    is total and reproducible. ``scored + skipped_insufficient_rows +
    skipped_singular == total_candidates`` always holds.
    """

    config: SearchConfig
    ranked: tuple[RankedCandidate, ...]
    total_candidates: int
    scored: int
    skipped_insufficient_rows: int
    skipped_singular: int

    @property
    def best(self) -> RankedCandidate:
        return self.ranked[0]

    @property
    def skip_stats(self) -> dict[str, int]:
        return {
            "total_candidates": self.total_candidates,
            "scored": self.scored,
            "skipped_insufficient_rows": self.skipped_insufficient_rows,
            "skipped_singular": self.skipped_singular,
        }


@dataclass(frozen=True)
class ModelBank:
    """One per-environment prediction model over a fixed input subset."""

    subset: tuple[str, ...]
    models: dict[str, LinearModel]
    skipped: dict[str, str]
    n_used: dict[str, int]

    def covers(self, environment_ids) -> bool:
        have = {canonical_key(e) for e in self.models}
        have |= {canonical_key(e) for e in self.skipped}
        return all(canonical_key(e) in have for e in environment_ids)


@dataclass
class SubsetSuite:
    """The named nested model family produced by the full pipeline."""

    models: dict[str, RankedCandidate]
    folds: int
    seed: int
    dataset_hash: str
    skip_stats: dict[str, dict[str, int]]
    banks: dict[str, ModelBank] = field(default_factory=dict)

    def subset(self, name: str) -> tuple[str, ...]:
        return self.models[name].subset


# ---------------------------------------------------------------------------
# Colex enumeration through the combinatorial number system.

def _comb_table(n: int, k: int) -> np.ndarray:
    """binomial(v, j) for v in 0..n, j in 0..k as int64 (caller bounds size)."""
    table = np.zeros((n + 1, k + 1), dtype=np.int64)
    for v in range(n + 1):
        for j in range(k + 1):
            table[v, j] = math.comb(v, j)
    return table


def _unrank_colex(ranks: np.ndarray, k: int, table: np.ndarray) -> np.ndarray:
    """Map colex ranks to ascending k-combinations of {0..n-1}.

    The combination at rank r satisfies r = sum_j binomial(c_j, j+1); the
    greedy digit extraction below inverts that, vectorized over ranks.
    """
    remaining = np.array(ranks, dtype=np.int64, copy=True)
    out = np.empty((len(remaining), k), dtype=np.int64)
    for j in range(k, 0, -1):
        col = table[:, j]
        v = np.searchsorted(col, remaining, side="right") - 1
        out[:, j - 1] = v
        remaining -= col[v]
    return out


# ---------------------------------------------------------------------------
# Block scoring engine.

@dataclass
class _SearchContext:
    """Everything a worker needs to score a rank interval; fully picklable."""

    X: np.ndarray          # (m, n_env + 1) log scores, NaN->0, ones column last
    avail: np.ndarray      # (m, n_env + 1) bool, ones column all-True
    t: np.ndarray          # (m,)
    env_names: tuple[str, ...]
    pool: np.ndarray       # eligible column indices, ascending
    must_cols: np.ndarray  # forced column indices
    subset_size: int
    with_intercept: bool
    folds: int
    seed: int
    top_k: int
    min_rows: int
    comb: np.ndarray       # binomial table for the pool
    fold_table: np.ndarray  # (m + 1, m): fold id per usable-rank, by row count

    @property
    def k_free(self) -> int:
        return self.subset_size - len(self.must_cols)


def _build_fold_table(m: int, folds: int, seed: int) -> np.ndarray:
    table = np.full((m + 1, max(m, 1)), -1, dtype=np.int32)
    for rows in range(folds, m + 1):
        table[rows, :rows] = fold_assignment(rows, folds, seed)
    return table


def _block_size(ctx: _SearchContext) -> int:
    override = os.environ.get("BENCHSEL_BLOCK_SIZE")
    if override:
        return max(1, int(override))
    m = ctx.X.shape[0]
    cols = ctx.subset_size + int(ctx.with_intercept)
    return int(max(256, min(32768, 8_000_000 // max(1, m * cols))))


def _score_block(ctx: _SearchContext, start: int, stop: int):
    """Score candidates with colex ranks in [start, stop).

    Returns (n_scored, n_skipped_rows, n_skipped_singular, finalists) where
    finalists holds at most top_k entries of
    (cv_mse, sorted-name key, env column tuple, n_usable).
    """
    n_block = stop - start
    positions = _unrank_colex(np.arange(start, stop), ctx.k_free, ctx.comb)
    env_cols = ctx.pool[positions]
    if len(ctx.must_cols):
        forced = np.broadcast_to(ctx.must_cols, (n_block, len(ctx.must_cols)))
        env_cols = np.sort(np.concatenate([forced, env_cols], axis=1), axis=1)
    if ctx.with_intercept:
        ones_col = np.full((n_block, 1), ctx.X.shape[1] - 1, dtype=np.int64)
        fit_cols = np.concatenate([env_cols, ones_col], axis=1)
    else:
        fit_cols = env_cols

    usable = ctx.avail[:, fit_cols].all(axis=2)      # (m, n_block)
    n_usable = usable.sum(axis=0)
    viable = n_usable >= ctx.min_rows
    n_skip_rows = int(n_block - viable.sum())
    if not viable.any():
        return 0, n_skip_rows, 0, []

    keep = np.flatnonzero(viable)
    env_cols = env_cols[keep]
    fit_cols = fit_cols[keep]
    usable = usable[:, keep]
    n_usable = n_usable[keep]

    rank = usable.cumsum(axis=0) - 1
    fold_id = ctx.fold_table[n_usable[None, :], rank]
    fold_id = np.where(usable, fold_id, -1)

    Xt = np.ascontiguousarray(ctx.X[:, fit_cols].transpose(1, 0, 2))  # (N, m, C)
    t = ctx.t
    cv_sum = np.zeros(len(keep))
    singular = np.zeros(len(keep), dtype=bool)

    for f in range(ctx.folds):
        w_train = ((fold_id != f) & usable).T        # (N, m)
        A = Xt * w_train[:, :, None]
        At = A.transpose(0, 2, 1)                    # (N, C, m)
        G = At @ Xt
        b = At @ t
        beta, bad = _chol_solve_batched(G, b)
        singular |= bad != -1
        w_test = (fold_id == f).T
        residual = ((Xt @ beta[:, :, None])[:, :, 0] - t) * w_test
        cv_sum += (residual ** 2).sum(axis=1) / w_test.sum(axis=1)
    cv = cv_sum / ctx.folds

    singular |= ~np.isfinite(cv)
    n_singular = int(singular.sum())
    good = np.flatnonzero(~singular)
    if not len(good):
        return 0, n_skip_rows, n_singular, []

    cv_good = cv[good]
    if len(good) > ctx.top_k:
        cutoff = np.partition(cv_good, ctx.top_k - 1)[ctx.top_k - 1]
        good = good[cv_good <= cutoff]
        cv_good = cv[good]
    finalists = []
    for cv_value, cand in zip(cv_good, good):
        names = tuple(ctx.env_names[c] for c in env_cols[cand])
        finalists.append((float(cv_value), tuple(sorted(names)),
                          tuple(int(c) for c in env_cols[cand]),
                          int(n_usable[cand])))
    finalists.sort(key=lambda e: (e[0], e[1]))
    return len(cv) - n_singular, n_skip_rows, n_singular, finalists[:ctx.top_k]


_WORKER_CTX: _SearchContext | None = None


def _worker_init(ctx: _SearchContext) -> None:
    global _WORKER_CTX
    _WORKER_CTX = ctx


def _worker_score(span: tuple[int, int]):
    return _score_block(_WORKER_CTX, span[0], span[1])


# ---------------------------------------------------------------------------
# Public search API.

def _default_progress(done: int, total: int) -> None:
    print(f"benchsel: scored {done:,} / {total:,} candidate subsets",
          file=sys.stderr, flush=True)


def _resolve_columns(dataset: PreparedDataset, names) -> list[int]:
    by_key = {canonical_key(e): j for j, e in enumerate(dataset.environment_ids)}
    cols = []
    for name in names:
        key = canonical_key(name)
        if key not in by_key:
            raise EnvironmentLookupError(name)
        cols.append(by_key[key])
    return cols


def _build_context(dataset: PreparedDataset, config: SearchConfig
                   ) -> _SearchContext:
    from .linreg import MAX_COLUMNS

    if config.subset_size + int(config.with_intercept) > MAX_COLUMNS:
        raise ValidationError(
            f"subset_size {config.subset_size} exceeds the {MAX_COLUMNS}"
            "-column solver limit")
    m, n = dataset.log_scores.shape
    X = np.ones((m, n + 1))
    X[:, :n] = np.nan_to_num(dataset.log_scores, nan=0.0)
    avail = np.ones((m, n + 1), dtype=bool)
    avail[:, :n] = dataset.present

    must_cols = np.array(sorted(_resolve_columns(dataset, config.must_include)),
                         dtype=np.int64)
    excluded = set(_resolve_columns(dataset, config.exclude))
    pool = np.array([j for j in range(n)
                     if j not in excluded and j not in set(must_cols)],
                    dtype=np.int64)
    k_free = config.subset_size - len(must_cols)
    if len(pool) < k_free:
        raise ValidationError(
            f"only {len(pool)} eligible environments for a size-"
            f"{config.subset_size} subset with {len(must_cols)} forced")
    if math.comb(len(pool), k_free) > MAX_ENUMERATION:
        raise ValidationError("search space too large to enumerate exhaustively")

    cols_fit = config.subset_size + int(config.with_intercept)
    return _SearchContext(
        X=X,
        avail=avail,
        t=np.asarray(dataset.targets, dtype=np.float64),
        env_names=dataset.environment_ids,
        pool=pool,
        must_cols=must_cols,
        subset_size=config.subset_size,
        with_intercept=config.with_intercept,
        folds=config.folds,
        seed=config.seed,
        top_k=config.top_k,
        min_rows=max(cols_fit + 2, config.folds),
        comb=_comb_table(len(pool), k_free),
        fold_table=_build_fold_table(m, config.folds, config.seed),
    )


def _refit(ctx: _SearchContext, cols: tuple[int, ...], cv_mse: float
           ) -> LinearModel:
    rows = np.flatnonzero(ctx.avail[:, list(cols)].all(axis=1))
    names = tuple(ctx.env_names[c] for c in cols)
    model = fit_ols(ctx.X[np.ix_(rows, list(cols))], ctx.t[rows],
                    with_intercept=ctx.with_intercept, environment_ids=names)
    return replace(model, stats=replace(model.stats, cv_mse=cv_mse))


def enumerate_and_score(dataset: PreparedDataset, config: SearchConfig, *,
                        threads: int = 1, progress=None) -> SearchResult:
    """Fit and rank every admissible subset of the configured size.

    Every ``subset_size``-combination containing ``must_include`` and
    avoiding ``exclude`` is cross-validated; the ranking ascends by cv_mse
    with lexicographic environment-name tie-breaks. ``threads`` only
    controls how rank blocks are dealt out, never the result.
    """
    ctx = _build_context(dataset, config)
    total = math.comb(len(ctx.pool), ctx.k_free)
    if progress is None:
        progress = _default_progress
    if threads <= 0:
        threads = os.cpu_count() or 1

    block = _block_size(ctx)
    spans = [(s, min(s + block, total)) for s in range(0, total, block)]

    scored = skipped_rows = skipped_singular = 0
    finalists: list[tuple] = []
    done = 0
    next_milestone = PROGRESS_STRIDE

    def consume(result, span):
        nonlocal scored, skipped_rows, skipped_singular, done, next_milestone
        n_scored, n_rows, n_sing, local = result
        scored += n_scored
        skipped_rows += n_rows
        skipped_singular += n_sing
        finalists.extend(local)
        if len(finalists) > 4 * config.top_k:
            finalists.sort(key=lambda e: (e[0], e[1]))
            del finalists[config.top_k:]
        done += span[1] - span[0]
        while done >= next_milestone:
            progress(next_milestone, total)
            next_milestone += PROGRESS_STRIDE

    if threads == 1 or len(spans) == 1:
        for span in spans:
            consume(_score_block(ctx, *span), span)
    else:
        mp = multiprocessing.get_context("fork")
        with mp.Pool(min(threads, len(spans)), initializer=_worker_init,
                     initargs=(ctx,)) as pool:
            for span, result in zip(spans, pool.imap(_worker_score, spans)):
                consume(result, span)

    if not scored:
        raise EmptySearchError(
            f"no viable size-{config.subset_size} candidate: "
            f"{skipped_rows} skipped for insufficient usable algorithms, "
            f"{skipped_singular} for singular designs",
            skip_stats={"total_candidates": total,
                        "skipped_insufficient_rows": skipped_rows,
                        "skipped_singular": skipped_singular})

    finalists.sort(key=lambda e: (e[0], e[1]))
    ranked = []
    for cv_mse, _, cols, n_used in finalists[:config.top_k]:
        try:
            model = _refit(ctx, cols, cv_mse)
        except SingularMatrixError:
            scored -= 1
            skipped_singular += 1
            continue
        ranked.append(RankedCandidate(
            subset=model.environment_ids, model=model,
            cv_mse=cv_mse, n_algorithms_used=n_used))
    if not ranked:
        raise EmptySearchError(
            "every finalist was singular at refit time",
            skip_stats={"total_candidates": total,
                        "skipped_insufficient_rows": skipped_rows,
                        "skipped_singular": skipped_singular})

    return SearchResult(
        config=config,
        ranked=tuple(ranked),
        total_candidates=total,
        scored=scored,
        skipped_insufficient_rows=skipped_rows,
        skipped_singular=skipped_singular,
    )


# ---------------------------------------------------------------------------
# The nested selection pipeline.

def nested_pipeline(dataset: PreparedDataset, folds: int = 10, seed: int = 0, *,
                    threads: int = 1, progress=None,
                    top_k: int = 10) -> SubsetSuite:
    """Run the ordered subset searches that produce the named suite.

    Stage order: the best size-5 subset overall; the best size-3 inside it;
    the best size-1 inside that; the best validation triple disjoint from
    the size-5; two more games extending it to a validation five; and five
    further games (disjoint from both) extending the size-5 to a size-10.
    Each named model is refit on all algorithms usable for its subset.
    """
    n = dataset.n_environments
    if n < PIPELINE_MIN_ENVIRONMENTS:
        raise ValidationError(
            f"nested pipeline needs at least {PIPELINE_MIN_ENVIRONMENTS} "
            f"environments, dataset has {n}")

    all_names = dataset.environment_ids
    models: dict[str, RankedCandidate] = {}
    skip_stats: dict[str, dict[str, int]] = {}

    def run(stage: str, size: int, must=(), exclude=()) -> RankedCandidate:
        config = SearchConfig(subset_size=size, must_include=tuple(must),
                              exclude=tuple(exclude), folds=folds, seed=seed,
                              top_k=top_k)
        try:
            result = enumerate_and_score(dataset, config, threads=threads,
                                         progress=progress)
        except EmptySearchError as exc:
            raise EmptySearchError(f"[{stage}] {exc}", exc.skip_stats) from exc
        skip_stats[stage] = result.skip_stats
        models[stage] = result.best
        return result.best

    def others(subset) -> tuple[str, ...]:
        keys = {canonical_key(e) for e in subset}
        return tuple(e for e in all_names if canonical_key(e) not in keys)

    size5 = run("size-5", 5)
    size3 = run("size-3", 3, exclude=others(size5.subset))
    run("size-1", 1, exclude=others(size3.subset))
    val3 = run("val-3", 3, exclude=size5.subset)
    val5 = run("val-5", 5, must=val3.subset, exclude=size5.subset)
    run("size-10", 10, must=size5.subset,
        exclude=tuple(val5.subset))

    suite = SubsetSuite(models=models, folds=folds, seed=seed,
                        dataset_hash=dataset.content_hash(),
                        skip_stats=skip_stats)
    _check_nesting(suite)
    return suite


def _check_nesting(suite: SubsetSuite) -> None:
    def keyset(name: str) -> set[str]:
        return {canonical_key(e) for e in suite.subset(name)}

    chain = ["size-1", "size-3", "size-5", "size-10"]
    for small, large in zip(chain, chain[1:]):
        if not keyset(small) <= keyset(large):
            raise ValidationError(f"nesting violated: {small} not inside {large}")
    if not keyset("val-3") <= keyset("val-5"):
        raise ValidationError("nesting violated: val-3 not inside val-5")
    if keyset("val-5") & keyset("size-5"):
        raise ValidationError("val-5 overlaps size-5")
    if (keyset("size-10") - keyset("size-5")) & keyset("val-5"):
        raise ValidationError("size-10 extension overlaps val-5")


# ---------------------------------------------------------------------------
# Per-environment prediction models.

def per_game_models(dataset: PreparedDataset, subset,
                    min_extra: int = 3) -> ModelBank:
    """Fit one intercept-bearing model per environment from a fixed subset.

    Environments inside the subset get exact identity models (coefficient 1
    on themselves, intercept 0) rather than fitted ones. An environment
    with fewer than ``len(subset) + min_extra`` usable algorithms is
    flagged unusable instead of aborting the bank.
    """
    subset_cols = _resolve_columns(dataset, subset)
    subset_names = tuple(dataset.environment_ids[j] for j in subset_cols)
    X = dataset.log_scores
    present = dataset.present
    subset_ok = present[:, subset_cols].all(axis=1)

    models: dict[str, LinearModel] = {}
    skipped: dict[str, str] = {}
    n_used: dict[str, int] = {}
    min_rows = len(subset_cols) + min_extra

    for g, env in enumerate(dataset.environment_ids):
        if g in subset_cols:
            coef = np.zeros(len(subset_cols))
            coef[subset_cols.index(g)] = 1.0
            models[env] = LinearModel(
                environment_ids=subset_names, coefficients=coef,
                intercept=0.0, stats=FitStats(r_squared=1.0, log_mae=0.0))
            n_used[env] = int(subset_ok.sum())
            continue
        rows = np.flatnonzero(subset_ok & present[:, g])
        n_used[env] = len(rows)
        if len(rows) < min_rows:
            skipped[env] = (f"only {len(rows)} usable algorithms "
                            f"(need {min_rows})")
            continue
        design = np.nan_to_num(X[np.ix_(rows, subset_cols)], nan=0.0)
        try:
            models[env] = fit_ols(design, X[rows, g], with_intercept=True,
                                  environment_ids=subset_names)
        except SingularMatrixError as exc:
            skipped[env] = f"singular design ({exc.column})"
    return ModelBank(subset=subset_names, models=models, skipped=skipped,
                     n_used=n_used)


def variance_explained(bank: ModelBank, dataset: PreparedDataset) -> float:
    """Pooled 1 - SS_res/SS_tot over all predictable cells of the dataset.

    For each environment with a usable model, residuals run over the
    algorithms that have both that environment's score and every subset
    score; SS_tot measures deviation from that environment's mean log score
    over the same cells. Environments flagged unusable contribute nothing.
    """
    if not bank.covers(dataset.environment_ids):
        raise ValidationError("bank does not cover every dataset environment")
    X = dataset.log_scores
    present = dataset.present
    by_key = {canonical_key(e): j for j, e in enumerate(dataset.environment_ids)}

    ss_res = 0.0
    ss_tot = 0.0
    for env, model in bank.models.items():
        g = by_key[canonical_key(env)]
        cols = [by_key[canonical_key(e)] for e in model.environment_ids]
        rows = np.flatnonzero(present[:, cols].all(axis=1) & present[:, g])
        if len(rows) < 2:
            continue
        y = X[rows, g]
        predictions = (X[np.ix_(rows, cols)] @ model.coefficients
                       + (model.intercept or 0.0))
        ss_res += float(((y - predictions) ** 2).sum())
        ss_tot += float(((y - y.mean()) ** 2).sum())
    if ss_tot == 0.0:
        return 0.0
    return 1.0 - ss_res / ss_tot


# ---------------------------------------------------------------------------
# Serialization of banks and suites.

BANK_FORMAT = "benchsel-bank/1"
SUITE_FORMAT = "benchsel-suite/1"


def bank_to_dict(bank: ModelBank, *, name: str | None = None,
                 norms_checksum: str | None = None) -> dict:
    from .linreg import model_to_dict

    return {
        "format": BANK_FORMAT,
        "name": name,
        "subset": list(bank.subset),
        "norms_checksum": norms_checksum,
        "models": {env: model_to_dict(m, name=env)
                   for env, m in sorted(bank.models.items())},
        "skipped": dict(sorted(bank.skipped.items())),
        "n_used": dict(sorted(bank.n_used.items())),
    }


def bank_from_dict(doc) -> ModelBank:
    from .linreg import model_from_dict

    if doc.get("format") != BANK_FORMAT:
        raise ValidationError(
            f"not a model-bank document (format={doc.get('format')!r})")
    return ModelBank(
        subset=tuple(doc["subset"]),
        models={env: model_from_dict(d) for env, d in doc["models"].items()},
        skipped=dict(doc.get("skipped", {})),
        n_used={k: int(v) for k, v in doc.get("n_used", {}).items()},
    )


def save_bank(path, bank: ModelBank, *, name: str | None = None,
              norms_checksum: str | None = None) -> None:
    import json

    with open(path, "w", encoding="utf-8") as fh:
        json.dump(bank_to_dict(bank, name=name, norms_checksum=norms_checksum),
                  fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_bank(path) -> tuple[ModelBank, dict]:
    import json

    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return bank_from_dict(doc), doc


def suite_to_dict(suite: SubsetSuite, *, norms_checksum: str | None = None
                  ) -> dict:
    from .linreg import model_to_dict

    return {
        "format": SUITE_FORMAT,
        "seed": suite.seed,
        "folds": suite.folds,
        "dataset_hash": suite.dataset_hash,
        "norms_checksum": norms_checksum,
        "skip_stats": suite.skip_stats,
        "models": {
            name: {
                "subset": list(cand.subset),
                "cv_mse": cand.cv_mse,
                "n_algorithms_used": cand.n_algorithms_used,
                "model": model_to_dict(cand.model, name=name,
                                       norms_checksum=norms_checksum),
            }
            for name, cand in sorted(suite.models.items())
        },
        "banks": {name: bank_to_dict(bank, name=name,
                                     norms_checksum=norms_checksum)
                  for name, bank in sorted(suite.banks.items())},
    }
