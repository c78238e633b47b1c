"""Acceptance gate: one test per release criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -v -s``).

Criterion 8 reproduces published numbers on a user-assembled full score
table and only runs when BENCHSEL_FULL_SCORES points at one (see the
README's data assembly guide); everything else is self-contained.
"""

import math
import os
import time

import numpy as np
import pytest

from benchsel import fixtures
from benchsel.analysis import (
    correlated_pairs,
    fairness_report,
    pearson_matrix,
    rank_single_games,
)
from benchsel.cli import main as cli_main
from benchsel.data import (
    FilterConfig,
    PreparedDataset,
    RawScoreTable,
    canonical_key,
    filter_dataset,
    inverse_log_transform,
    load_norms,
    load_scores,
    log_transform,
    normalize,
    prepare_dataset,
)
from benchsel.linreg import LinearModel, fit_ols, predict_linear
from benchsel.predict import make_report, predict_summary, rebase_scores, \
    inversion_count, relative_error
from benchsel.search import SearchConfig, enumerate_and_score, \
    nested_pipeline, per_game_models, variance_explained

LN10 = math.log(10.0)


def report(criterion: str, label: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {criterion} {label}: {status}{suffix}")
    assert ok, f"{criterion} {label}{suffix}"


def test_criterion_1_ols_oracle_equivalence():
    rng = np.random.default_rng(1001)
    started = time.perf_counter()
    worst_coef = 0.0
    worst_orth = 0.0
    for _ in range(1000):
        rows = int(rng.integers(20, 201))
        cols = int(rng.integers(1, 12))
        with_intercept = bool(rng.integers(2))
        X = rng.normal(size=(rows, cols))
        t = rng.normal(size=rows)
        model = fit_ols(X, t, with_intercept=with_intercept)
        Xa = np.hstack([X, np.ones((rows, 1))]) if with_intercept else X
        oracle = np.linalg.inv(Xa.T @ Xa) @ (Xa.T @ t)
        ours = (np.append(model.coefficients, model.intercept)
                if with_intercept else model.coefficients)
        scale = max(1e-30, float(np.abs(oracle).max()))
        worst_coef = max(worst_coef, float(np.abs(ours - oracle).max()) / scale)
        residual = t - Xa @ ours
        worst_orth = max(worst_orth, float(np.abs(Xa.T @ residual).max()))
    elapsed = time.perf_counter() - started
    report("C1", "ols-oracle-equivalence",
           worst_coef <= 1e-9 and worst_orth <= 1e-8 and elapsed < 10.0,
           f"coef={worst_coef:.2e} orth={worst_orth:.2e} "
           f"time={elapsed:.1f}s")


def test_criterion_2_synthetic_subset_recovery():
    started = time.perf_counter()
    expected = {"e03", "e07", "e12"}
    wins = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        X = rng.uniform(0.0, 3.0, size=(60, 20))
        t = (0.4 * X[:, 2] + 0.5 * X[:, 6] + 0.1 * X[:, 11]
             + rng.normal(0.0, 0.02, size=60))
        dataset = PreparedDataset(
            tuple(f"a{i:02d}" for i in range(60)),
            tuple(f"e{j + 1:02d}" for j in range(20)),
            X, t, "median", FilterConfig(1, 1))
        result = enumerate_and_score(
            dataset, SearchConfig(subset_size=3, folds=10, seed=seed),
            progress=lambda *_: None)
        wins += set(result.best.subset) == expected
    elapsed = time.perf_counter() - started
    report("C2", "synthetic-subset-recovery",
           wins >= 95 and elapsed < 120.0,
           f"recovered={wins}/100 time={elapsed:.1f}s")


def test_criterion_3_search_determinism_across_workers(tmp_path, monkeypatch):
    monkeypatch.setenv("BENCHSEL_BLOCK_SIZE", "32")
    rng = np.random.default_rng(3003)
    envs = [f"e{j:02d}" for j in range(12)]
    m = 30
    base = rng.uniform(0.2, 2.2, size=m)
    log_scores = np.clip(base[:, None] + rng.normal(0, 0.2, (m, 12)),
                         0.01, None)
    raw = np.power(10.0, log_scores) - 1.0
    scores_path = tmp_path / "scores.csv"
    with open(scores_path, "w") as fh:
        fh.write("algorithm," + ",".join(envs) + "\n")
        for i in range(m):
            fh.write(f"a{i:02d}," + ",".join(f"{x:.6f}" for x in raw[i]) + "\n")
    norms_path = tmp_path / "norms.csv"
    with open(norms_path, "w") as fh:
        fh.write("environment,random,human\n")
        for env in envs:
            fh.write(f"{env},0,100\n")
    outputs = []
    for threads in (1, 12):
        out = tmp_path / f"threads-{threads}"
        rc = cli_main(["search", "--scores", str(scores_path),
                       "--norms", str(norms_path), "--size", "4",
                       "--min-games", "5", "--min-algos", "5",
                       "--folds", "10", "--seed", "0",
                       "--threads", str(threads), "--top-k", "100",
                       "--out", str(out), "--quiet"])
        assert rc == 0
        outputs.append(((out / "ranked.csv").read_bytes(),
                        (out / "best_model.json").read_bytes()))
    report("C3", "worker-count-determinism",
           outputs[0] == outputs[1],
           "ranked.csv and best_model.json byte-identical for 1 vs 12 workers")


def test_criterion_4_transform_anchors():
    norms = fixtures.load_normalization()
    env_ids = norms.environment_ids
    randoms = np.array([norms.lookup(e).random for e in env_ids])
    humans = np.array([norms.lookup(e).human for e in env_ids])
    table = RawScoreTable(("random", "human"), env_ids,
                          np.vstack([randoms, humans]))
    z = normalize(table, norms)
    anchors_ok = bool(np.all(z[0] == 0.0) and np.all(z[1] == 100.0))

    rng = np.random.default_rng(4004)
    x = rng.uniform(0.0, 1e4, size=1_000_000)
    back = np.asarray(inverse_log_transform(log_transform(x)))
    round_trip_ok = bool(np.all(np.abs(back - x) <= 1e-12 * (1.0 + x)))
    report("C4", "transform-anchors", anchors_ok and round_trip_ok,
           f"57 environments anchored exactly; max round-trip error "
           f"{np.max(np.abs(back - x) / (1.0 + x)):.2e}")


def test_criterion_5_weak_monotonicity():
    rng = np.random.default_rng(5005)
    violations = 0
    for _ in range(10_000):
        cols = int(rng.integers(1, 11))
        model = LinearModel(tuple(f"e{k}" for k in range(cols)),
                            np.abs(rng.normal(size=cols)))
        low = rng.uniform(0.0, 4.0, size=cols)
        bumps = rng.uniform(0.0, 2.0, size=cols) * rng.integers(0, 2, cols)
        high = low + bumps
        if predict_linear(model, high) < predict_linear(model, low):
            violations += 1
    report("C5", "weak-monotonicity", violations == 0,
           f"{violations} violations in 10000 dominating pairs")


def test_criterion_6_relative_error_approximation():
    rng = np.random.default_rng(6006)
    y = rng.uniform(0.0, 1e4, size=100_000)
    delta_e = rng.uniform(-0.05, 0.05, size=100_000)  # natural-log residual
    y_hat = (1.0 + y) * np.exp(delta_e) - 1.0
    delta10 = np.log10((1.0 + y_hat) / (1.0 + y))
    approx = LN10 * np.abs(delta10)
    exact = np.abs(y_hat - y) / (1.0 + y)
    gap = float(np.abs(approx - exact).max())
    report("C6", "relative-error-approximation", gap <= 0.006,
           f"max gap {gap:.5f} over 100000 pairs")


def test_criterion_7_fixture_model_application():
    atari3, _ = fixtures.load_subset_model("atari3")
    unit = predict_linear(atari3, [1.0, 1.0, 1.0])
    sum_ok = abs(unit - 0.9854) <= 1e-4

    bank, _ = fixtures.load_reference_bank("atari5_bank")
    identity_ok = True
    probe = np.array([0.3, 2.71, 0.0, 1.25, 3.9])
    for i, env in enumerate(bank.subset):
        x = np.zeros(5)
        x[i] = probe[i]
        if predict_linear(bank.models[env], x) != probe[i]:
            identity_ok = False
    report("C7", "fixture-model-application", sum_ok and identity_ok,
           f"atari3 unit-input prediction {unit!r}; identity rows exact")


def test_criterion_9_case_study_mechanics():
    medians = {"C51": 109.0, "IQN": 129.0, "C2D": 133.0, "Rainbow": 147.0}
    published_rel = {"C51": 0.126, "IQN": 0.260, "C2D": 0.170,
                     "Rainbow": 0.198}
    published_scores = {"C51": 96.0, "IQN": 95.0, "C2D": 111.0,
                        "Rainbow": 118.0}
    published_rebased = {"C51": 0.090, "IQN": 0.077, "C2D": 0.035,
                         "Rainbow": 0.0}

    # Predictions consistent with the published relative errors
    predictions = {a: medians[a] * (1.0 - published_rel[a]) for a in medians}
    rel_ok = all(
        abs(abs(relative_error(medians[a], predictions[a]))
            - published_rel[a]) <= 0.001
        for a in medians)

    reports = [make_report(a, predictions[a], true_summary=medians[a])
               for a in medians]
    rebased = rebase_scores(reports, "Rainbow")
    rebase_ok = all(
        abs(abs(r.relative_error) - published_rebased[r.algorithm_id]) <= 0.001
        for r in rebased)

    # Orderings follow the published score columns; the single swap is
    # C51 vs IQN.
    by_median = sorted(medians, key=lambda a: -medians[a])
    by_published = sorted(published_scores, key=lambda a: -published_scores[a])
    inversions = inversion_count(by_median, by_published)
    report("C9", "case-study-mechanics",
           rel_ok and rebase_ok and inversions == 1,
           f"relative errors and rebased errors within 0.1pt; "
           f"inversions={inversions}")


FULL_SCORES_VAR = "BENCHSEL_FULL_SCORES"


@pytest.mark.skipif(FULL_SCORES_VAR not in os.environ,
                    reason=f"set {FULL_SCORES_VAR} to an assembled full "
                           "score table (see README, data assembly guide) "
                           "to run the published-number reproduction")
def test_criterion_8_full_dataset_reproduction():
    started = time.perf_counter()
    scores_path = os.environ[FULL_SCORES_VAR]
    norms_path = os.environ.get("BENCHSEL_FULL_NORMS",
                                str(fixtures.normalization_path()))
    threads = int(os.environ.get("BENCHSEL_THREADS", "0"))
    raw = load_scores(scores_path)
    norms = load_norms(norms_path)
    dataset = prepare_dataset(raw, norms, min_games=40, min_algorithms=40,
                              target_stat="median")

    suite = nested_pipeline(dataset, folds=10, seed=0, threads=threads)
    expected_five = {canonical_key(e) for e in
                     ("Battle Zone", "Double Dunk", "Name This Game",
                      "Phoenix", "Q*Bert")}
    selected = {canonical_key(e) for e in suite.subset("size-5")}
    report("C8a", "atari5-selection", selected == expected_five,
           ", ".join(sorted(suite.subset("size-5"))))

    model = suite.models["size-5"].model
    report("C8b", "atari5-r-squared",
           abs(model.stats.r_squared - 0.984) <= 0.01,
           f"r_squared={model.stats.r_squared:.4f}")
    approx_rel = LN10 * model.stats.log_mae
    report("C8c", "atari5-approx-rel-err",
           abs(approx_rel - 0.104) <= 0.015,
           f"approx rel err={approx_rel:.4f}")

    bank5 = per_game_models(dataset, suite.subset("size-5"))
    bank10 = per_game_models(dataset, suite.subset("size-10"))
    ve5 = variance_explained(bank5, dataset)
    ve10 = variance_explained(bank10, dataset)
    report("C8d", "variance-explained",
           abs(ve5 - 0.715) <= 0.02 and abs(ve10 - 0.800) <= 0.02,
           f"size-5 bank {ve5:.3f}, size-10 bank {ve10:.3f}")

    graph = pearson_matrix(dataset)
    top = correlated_pairs(graph, top_n=1)[0]
    report("C8e", "top-correlated-pair",
           {canonical_key(top.env_a), canonical_key(top.env_b)}
           == {"alien", "mspacman"},
           f"{top.env_a} / {top.env_b} pcc={top.pcc:.3f}")

    # Fairness audit over algorithms with all five games available; truths
    # come from the same filtered table as the pipeline targets.
    filtered = filter_dataset(raw, 40, 40)
    normalized = normalize(filtered, norms)
    med = np.nanmedian(normalized, axis=1)
    reports = []
    for i, algorithm in enumerate(filtered.algorithm_ids):
        row = {env: float(x)
               for env, x in zip(filtered.environment_ids, filtered.scores[i])
               if not np.isnan(x)}
        try:
            predicted = predict_summary(model, row, norms)
        except Exception:
            continue
        reports.append(make_report(algorithm, predicted,
                                   true_summary=float(med[i])))
    audit = fairness_report(reports, alpha=0.05)
    report("C8f", "fairness-not-significant", not audit.any_significant,
           f"{len(reports)} algorithms audited")

    # Diagnostic extras that should hold on a faithful assembly
    ranking = rank_single_games(dataset)
    best_single = ranking.ranked[-1]
    report("C8g", "zaxxon-best-single",
           canonical_key(best_single.environment) == "zaxxon"
           and abs(best_single.r_squared - 0.903) <= 0.02,
           f"{best_single.environment} r2={best_single.r_squared:.3f}")

    elapsed = time.perf_counter() - started
    report("C8h", "runtime-budget", elapsed <= 7200.0,
           f"{elapsed / 60:.1f} minutes")
