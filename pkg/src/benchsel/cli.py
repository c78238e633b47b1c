"""Command-line front end: search, pipeline, predict, analyze.

Every command is deterministic given (inputs, flags, seed), including the
worker count. Exit codes: 0 on success, 1 for data or runtime errors, 2
for usage errors. Output files that must be byte-reproducible embed the
input checksum chain and reference the run manifest (which holds the
volatile details like wall time) by file name.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
import traceback

import numpy as np

from . import __version__, fixtures
from .analysis import (
    correlated_pairs,
    export_dot,
    fairness_report,
    load_categories,
    pearson_matrix,
    rank_single_games,
)
from .data import (
    canonical_key,
    filter_dataset,
    load_norms,
    load_scores_with_values,
    normalize,
    prepare_dataset,
)
from .errors import BenchselError
from .linreg import load_model, model_to_dict
from .manifest import RunManifest, checksum_chain, sha256_file
from .predict import (
    inversion_count,
    make_report,
    predict_summary,
    rebase_scores,
)
from .search import (
    SearchConfig,
    bank_to_dict,
    enumerate_and_score,
    nested_pipeline,
    per_game_models,
    suite_to_dict,
    variance_explained,
)

LN10 = math.log(10.0)


def _fmt(value) -> str:
    """Full-precision, reproducible rendering of a cell value."""
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _add_io_flags(parser: argparse.ArgumentParser, *, norms_default=True):
    parser.add_argument("--scores", required=True,
                        help="raw score CSV (header: algorithm,<env>,...)")
    parser.add_argument("--norms",
                        default=str(fixtures.normalization_path())
                        if norms_default else None,
                        required=not norms_default,
                        help="normalization CSV (environment,random,human); "
                             "defaults to the shipped 57-game table")
    parser.add_argument("--out", default="benchsel-out",
                        help="output directory (created if missing)")
    parser.add_argument("--quiet", action="store_true",
                        help="suppress progress output on stderr")
    parser.add_argument("--json", action="store_true",
                        help="print a JSON summary to stdout instead of text")


def _add_dataset_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--min-games", type=int, default=40,
                        help="drop algorithms with fewer present scores")
    parser.add_argument("--min-algos", type=int, default=40,
                        help="then drop environments with fewer present scores")
    parser.add_argument("--target", choices=("median", "mean"),
                        default="median", help="summary statistic to predict")
    parser.add_argument("--ignore-columns", default="",
                        help="comma-separated non-score columns to ignore "
                             "(e.g. a true-summary column)")


def _add_search_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--folds", type=int, default=10,
                        help="cross-validation folds")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for the fold shuffle")
    parser.add_argument("--threads", type=int,
                        default=int(os.environ.get("BENCHSEL_THREADS", "0")),
                        help="worker processes; 0 = auto-detect")


def _split_csv_flag(raw: str) -> tuple[str, ...]:
    return tuple(s.strip() for s in raw.split(",") if s.strip())


def _gather_multi(values) -> tuple[str, ...]:
    out: list[str] = []
    for item in values or ():
        out.extend(_split_csv_flag(item))
    return tuple(out)


def _load_dataset(args):
    ignore = _split_csv_flag(args.ignore_columns)
    table, _ = load_scores_with_values(args.scores, ignore)
    norms = load_norms(args.norms)
    dataset = prepare_dataset(table, norms,
                              min_games=args.min_games,
                              min_algorithms=args.min_algos,
                              target_stat=args.target)
    checksums = {"scores": sha256_file(args.scores),
                 "norms": sha256_file(args.norms)}
    return dataset, norms, checksums


def _progress_for(args):
    if args.quiet:
        return lambda done, total: None
    return None  # module default: one stderr line per million candidates


def _write_manifest(args, command, checksums, *, seed=None, started=None,
                    workers=None, notes=None) -> RunManifest:
    manifest = RunManifest(
        command=command,
        config={k: v for k, v in sorted(vars(args).items())
                if k not in ("func",)},
        input_checksums=checksums,
        seed=seed,
        tool_version=__version__,
        wall_time_s=None if started is None else round(time.time() - started, 3),
        workers=workers,
        notes=notes or {},
    )
    manifest.save(os.path.join(args.out, "manifest.json"))
    return manifest


def _model_summary_row(name, subset, model):
    approx = (None if model.stats.log_mae is None
              else LN10 * model.stats.log_mae)
    return {
        "name": name,
        "games": list(subset),
        "r_squared": model.stats.r_squared,
        "cv_mse": model.stats.cv_mse,
        "approx_rel_err": approx,
    }


# ---------------------------------------------------------------------------
# search

def cmd_search(args) -> int:
    started = time.time()
    os.makedirs(args.out, exist_ok=True)
    dataset, _, checksums = _load_dataset(args)
    config = SearchConfig(
        subset_size=args.size,
        must_include=_gather_multi(args.include),
        exclude=_gather_multi(args.exclude),
        folds=args.folds,
        seed=args.seed,
        with_intercept=args.intercept,
        top_k=args.top_k,
    )
    result = enumerate_and_score(dataset, config, threads=args.threads,
                                 progress=_progress_for(args))

    ranked_path = os.path.join(args.out, "ranked.csv")
    with open(ranked_path, "w", newline="", encoding="utf-8") as fh:
        fh.write("# benchsel search ranking\n")
        fh.write(f"# inputs: {checksum_chain(checksums)}\n")
        fh.write(f"# config: size={args.size} folds={args.folds} "
                 f"seed={args.seed} intercept={args.intercept} "
                 f"target={args.target}\n")
        fh.write(f"# candidates: total={result.total_candidates} "
                 f"scored={result.scored} "
                 f"skipped_rows={result.skipped_insufficient_rows} "
                 f"skipped_singular={result.skipped_singular}\n")
        fh.write("# manifest: manifest.json\n")
        writer = csv.writer(fh)
        writer.writerow(["rank", "cv_mse", "r_squared", "n_algorithms",
                         "environments"])
        for rank, cand in enumerate(result.ranked, start=1):
            writer.writerow([rank, _fmt(cand.cv_mse),
                             _fmt(cand.model.stats.r_squared),
                             cand.n_algorithms_used,
                             " | ".join(cand.subset)])

    best = result.best
    with open(os.path.join(args.out, "best_model.json"), "w",
              encoding="utf-8") as fh:
        json.dump(model_to_dict(best.model, name=f"best-of-size-{args.size}",
                                norms_checksum=checksums["norms"],
                                extra={"input_checksums": checksums,
                                       "manifest": "manifest.json",
                                       "target_stat": args.target,
                                       "seed": args.seed,
                                       "folds": args.folds,
                                       "n_algorithms_used":
                                           best.n_algorithms_used}),
                  fh, indent=2, sort_keys=True)
        fh.write("\n")

    _write_manifest(args, "search", checksums, seed=args.seed,
                    started=started, workers=args.threads,
                    notes=result.skip_stats)
    summary = _model_summary_row(f"best-of-size-{args.size}", best.subset,
                                 best.model)
    summary["cv_mse"] = best.cv_mse
    summary["skip_stats"] = result.skip_stats
    if args.json:
        print(json.dumps(summary, indent=2, sort_keys=True))
    elif not args.quiet:
        print(f"best size-{args.size} subset: {', '.join(best.subset)}")
        print(f"  cv_mse={best.cv_mse:.6g}  "
              f"r_squared={best.model.stats.r_squared:.4f}  "
              f"algorithms={best.n_algorithms_used}")
        print(f"wrote {ranked_path}")
    return 0


# ---------------------------------------------------------------------------
# pipeline

def cmd_pipeline(args) -> int:
    started = time.time()
    os.makedirs(args.out, exist_ok=True)
    os.makedirs(os.path.join(args.out, "models"), exist_ok=True)
    os.makedirs(os.path.join(args.out, "banks"), exist_ok=True)
    dataset, _, checksums = _load_dataset(args)
    suite = nested_pipeline(dataset, folds=args.folds, seed=args.seed,
                            threads=args.threads,
                            progress=_progress_for(args))
    suite.banks["size-5"] = per_game_models(dataset, suite.subset("size-5"))
    suite.banks["size-10"] = per_game_models(dataset, suite.subset("size-10"))
    explained = {name: variance_explained(bank, dataset)
                 for name, bank in suite.banks.items()}

    suite_doc = suite_to_dict(suite, norms_checksum=checksums["norms"])
    suite_doc["input_checksums"] = checksums
    suite_doc["manifest"] = "manifest.json"
    suite_doc["variance_explained"] = explained
    with open(os.path.join(args.out, "suite.json"), "w",
              encoding="utf-8") as fh:
        json.dump(suite_doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for name, cand in sorted(suite.models.items()):
        with open(os.path.join(args.out, "models", f"{name}.json"), "w",
                  encoding="utf-8") as fh:
            json.dump(model_to_dict(cand.model, name=name,
                                    norms_checksum=checksums["norms"],
                                    extra={"input_checksums": checksums,
                                           "manifest": "manifest.json",
                                           "cv_mse": cand.cv_mse}),
                      fh, indent=2, sort_keys=True)
            fh.write("\n")
    for name, bank in sorted(suite.banks.items()):
        bank_doc = bank_to_dict(bank, name=name,
                                norms_checksum=checksums["norms"])
        bank_doc["input_checksums"] = checksums
        bank_doc["manifest"] = "manifest.json"
        with open(os.path.join(args.out, "banks", f"{name}.json"), "w",
                  encoding="utf-8") as fh:
            json.dump(bank_doc, fh, indent=2, sort_keys=True)
            fh.write("\n")

    rows = [_model_summary_row(name, suite.subset(name),
                               suite.models[name].model)
            for name in ("size-1", "size-3", "size-5", "size-10",
                         "val-3", "val-5")]
    name_w = max(len(r["name"]) for r in rows)
    games_w = max(len(", ".join(r["games"])) for r in rows)
    lines = [f"# inputs: {checksum_chain(checksums)}",
             f"# seed: {args.seed}  folds: {args.folds}  "
             f"target: {args.target}",
             "# manifest: manifest.json",
             f"{'name':<{name_w}}  {'games':<{games_w}}  "
             f"{'r_squared':>9}  {'approx_rel_err':>14}"]
    for r in rows:
        rel = "" if r["approx_rel_err"] is None else f"{r['approx_rel_err']:.1%}"
        lines.append(f"{r['name']:<{name_w}}  "
                     f"{', '.join(r['games']):<{games_w}}  "
                     f"{r['r_squared']:>9.3f}  {rel:>14}")
    for name in ("size-5", "size-10"):
        lines.append(f"variance explained ({name} bank): "
                     f"{explained[name]:.1%}")
    summary_text = "\n".join(lines) + "\n"
    with open(os.path.join(args.out, "summary.txt"), "w",
              encoding="utf-8") as fh:
        fh.write(summary_text)
    with open(os.path.join(args.out, "summary.csv"), "w", newline="",
              encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["name", "games", "r_squared", "cv_mse",
                         "approx_rel_err"])
        for r in rows:
            writer.writerow([r["name"], " | ".join(r["games"]),
                             _fmt(r["r_squared"]), _fmt(r["cv_mse"]),
                             _fmt(r["approx_rel_err"])])

    _write_manifest(args, "pipeline", checksums, seed=args.seed,
                    started=started, workers=args.threads,
                    notes={"skip_stats": suite.skip_stats})
    if args.json:
        print(json.dumps({"models": rows, "variance_explained": explained},
                         indent=2, sort_keys=True))
    elif not args.quiet:
        print(summary_text, end="")
    return 0


# ---------------------------------------------------------------------------
# predict

def _resolve_model_path(name_or_path: str) -> str:
    if os.path.exists(name_or_path):
        return name_or_path
    if name_or_path in fixtures.SUBSET_MODEL_NAMES:
        return str(fixtures.subset_model_path(name_or_path))
    raise BenchselError(
        f"model {name_or_path!r} is neither a file nor a shipped reference "
        f"model ({', '.join(fixtures.SUBSET_MODEL_NAMES)})")


def cmd_predict(args) -> int:
    started = time.time()
    os.makedirs(args.out, exist_ok=True)
    model_path = _resolve_model_path(args.model)
    model, model_doc = load_model(model_path)
    norms = load_norms(args.norms)
    checksums = {"scores": sha256_file(args.scores),
                 "norms": sha256_file(args.norms),
                 "model": sha256_file(model_path)}

    embedded = model_doc.get("norms_checksum")
    if embedded and embedded != checksums["norms"]:
        message = (f"normalization table checksum {checksums['norms']} does "
                   f"not match the one the model was fitted against "
                   f"({embedded})")
        if args.strict:
            raise BenchselError(message)
        print(f"warning: {message}", file=sys.stderr)

    value_columns = (args.true_summary,) if args.true_summary else ()
    table, values = load_scores_with_values(args.scores, value_columns)
    truths = values.get(args.true_summary, {}) if args.true_summary else {}

    reports = []
    row_errors: dict[str, str] = {}
    model_keys = {canonical_key(e) for e in model.environment_ids}
    for i, algorithm in enumerate(table.algorithm_ids):
        raw_row = {env: float(x)
                   for env, x in zip(table.environment_ids, table.scores[i])
                   if not np.isnan(x)}
        try:
            predicted = predict_summary(model, raw_row, norms)
        except BenchselError as exc:
            row_errors[algorithm] = str(exc)
            continue
        inputs = {env: value for env, value in raw_row.items()
                  if canonical_key(env) in model_keys}
        reports.append(make_report(algorithm, predicted,
                                   true_summary=truths.get(algorithm),
                                   inputs_used=inputs))

    def write_report_csv(path, rows):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(f"# inputs: {checksum_chain(checksums)}\n")
            fh.write("# manifest: manifest.json\n")
            writer = csv.writer(fh)
            writer.writerow(["algorithm", "predicted", "true", "rel_error",
                             "abs_rel_error"])
            for r in rows:
                writer.writerow([r.algorithm_id, _fmt(r.predicted_summary),
                                 _fmt(r.true_summary), _fmt(r.relative_error),
                                 _fmt(r.abs_relative_error)])

    write_report_csv(os.path.join(args.out, "predictions.csv"), reports)

    inversions = None
    scored = [r for r in reports if r.true_summary is not None]
    if len(scored) >= 2:
        by_truth = [r.algorithm_id for r in sorted(
            scored, key=lambda r: (-r.true_summary, r.algorithm_id))]
        by_prediction = [r.algorithm_id for r in sorted(
            scored, key=lambda r: (-r.predicted_summary, r.algorithm_id))]
        inversions = inversion_count(by_truth, by_prediction)

    rebased = None
    if args.baseline:
        rebased = rebase_scores(reports, args.baseline)
        write_report_csv(os.path.join(args.out, "rebased.csv"), rebased)

    detail = {
        "format": "benchsel-predictions/1",
        "model": model_doc.get("name"),
        "input_checksums": checksums,
        "manifest": "manifest.json",
        "inversion_count": inversions,
        "baseline": args.baseline,
        "row_errors": dict(sorted(row_errors.items())),
        "reports": [
            {"algorithm": r.algorithm_id,
             "predicted": r.predicted_summary,
             "true": r.true_summary,
             "rel_error": r.relative_error,
             "inputs_used": r.inputs_used}
            for r in reports
        ],
        "rebased": None if rebased is None else [
            {"algorithm": r.algorithm_id,
             "predicted": r.predicted_summary,
             "true": r.true_summary,
             "rel_error": r.relative_error}
            for r in rebased
        ],
    }
    with open(os.path.join(args.out, "predictions.json"), "w",
              encoding="utf-8") as fh:
        json.dump(detail, fh, indent=2, sort_keys=True)
        fh.write("\n")

    _write_manifest(args, "predict", checksums, started=started,
                    notes={"rows": len(reports),
                           "row_errors": len(row_errors)})
    if args.json:
        print(json.dumps(detail, indent=2, sort_keys=True))
    elif not args.quiet:
        for r in reports:
            line = f"{r.algorithm_id}: predicted {r.predicted_summary:.1f}"
            if r.true_summary is not None and r.relative_error is not None:
                line += (f" (true {r.true_summary:.1f}, "
                         f"rel err {r.relative_error:+.1%})")
            elif r.true_summary is not None:
                line += f" (true {r.true_summary:.1f})"
            print(line)
        for algorithm, message in sorted(row_errors.items()):
            print(f"{algorithm}: skipped ({message})")
        if inversions is not None:
            print(f"ranking inversions vs truth: {inversions}")
    return 0


# ---------------------------------------------------------------------------
# analyze

def cmd_analyze_rank_single(args) -> int:
    started = time.time()
    os.makedirs(args.out, exist_ok=True)
    dataset, _, checksums = _load_dataset(args)
    ranking = rank_single_games(dataset)
    path = os.path.join(args.out, "single_games.csv")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# inputs: {checksum_chain(checksums)}\n")
        fh.write("# manifest: manifest.json\n")
        fh.write("# least predictive first\n")
        writer = csv.writer(fh)
        writer.writerow(["environment", "slope", "intercept", "r_squared",
                         "n_algorithms"])
        for f in ranking.ranked:
            writer.writerow([f.environment, _fmt(f.slope), _fmt(f.intercept),
                             _fmt(f.r_squared), f.n_algorithms])
    _write_manifest(args, "analyze rank-single", checksums, started=started,
                    notes={"flagged": ranking.flagged})
    if args.json:
        print(json.dumps([f.__dict__ for f in ranking.ranked], indent=2))
    elif not args.quiet:
        best = ranking.ranked[-1] if ranking.ranked else None
        if best:
            print(f"most predictive single game: {best.environment} "
                  f"(r_squared={best.r_squared:.3f})")
        print(f"wrote {path}")
    return 0


def cmd_analyze_correlate(args) -> int:
    started = time.time()
    os.makedirs(args.out, exist_ok=True)
    dataset, _, checksums = _load_dataset(args)
    categories = None
    if args.categories:
        categories = load_categories(args.categories)
        checksums["categories"] = sha256_file(args.categories)
    graph = pearson_matrix(dataset, categories)
    pairs = correlated_pairs(graph, threshold=args.threshold, top_n=args.top)
    path = os.path.join(args.out, "pairs.csv")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# inputs: {checksum_chain(checksums)}\n")
        fh.write(f"# threshold: {args.threshold}\n")
        fh.write("# manifest: manifest.json\n")
        writer = csv.writer(fh)
        writer.writerow(["env_a", "env_b", "pcc", "n_algorithms",
                         "highly_correlated"])
        for p in pairs:
            writer.writerow([p.env_a, p.env_b, _fmt(p.pcc), p.n_pairs,
                             p.highly_correlated])
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(export_dot(pairs, categories))
    _write_manifest(args, "analyze correlate", checksums, started=started)
    if args.json:
        print(json.dumps([p.__dict__ for p in pairs], indent=2))
    elif not args.quiet:
        if pairs:
            top = pairs[0]
            print(f"most correlated pair: {top.env_a} / {top.env_b} "
                  f"(pcc={top.pcc:.3f})")
        print(f"wrote {path}")
    return 0


def cmd_analyze_fairness(args) -> int:
    started = time.time()
    os.makedirs(args.out, exist_ok=True)
    model_path = _resolve_model_path(args.model)
    model, _ = load_model(model_path)
    norms = load_norms(args.norms)
    ignore = _split_csv_flag(args.ignore_columns)
    value_columns = ((args.true_summary,) if args.true_summary else ()) + ignore
    table, values = load_scores_with_values(args.scores, value_columns)
    checksums = {"scores": sha256_file(args.scores),
                 "norms": sha256_file(args.norms),
                 "model": sha256_file(model_path)}

    if args.true_summary:
        truths = values[args.true_summary]
    else:
        # True summaries from the table itself: the target statistic over
        # each algorithm's present normalized scores.
        filtered = filter_dataset(table, args.min_games, 1)
        normalized = normalize(filtered, norms)
        reduce = np.nanmedian if args.target == "median" else np.nanmean
        truths = {a: float(reduce(normalized[i]))
                  for i, a in enumerate(filtered.algorithm_ids)}

    reports = []
    for i, algorithm in enumerate(table.algorithm_ids):
        raw_row = {env: float(x)
                   for env, x in zip(table.environment_ids, table.scores[i])
                   if not np.isnan(x)}
        try:
            predicted = predict_summary(model, raw_row, norms)
        except BenchselError:
            continue
        if truths.get(algorithm) is None:
            continue
        reports.append(make_report(algorithm, predicted,
                                   true_summary=truths[algorithm]))

    report = fairness_report(reports, alpha=args.alpha)
    doc = {
        "format": "benchsel-fairness/1",
        "alpha": report.alpha,
        "input_checksums": checksums,
        "manifest": "manifest.json",
        "groups": {
            name: {"algorithms": list(g.algorithm_ids),
                   "mean_abs_rel_error": g.mean_abs_rel_error,
                   "mean_rel_error": g.mean_rel_error}
            for name, g in report.groups.items()
        },
        "pairwise": {
            f"{a}-vs-{b}": t.__dict__
            for (a, b), t in report.pairwise.items()
        },
        "any_significant": report.any_significant,
    }
    path = os.path.join(args.out, "fairness.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(args, "analyze fairness", checksums, started=started)
    if args.json:
        print(json.dumps(doc, indent=2, sort_keys=True))
    elif not args.quiet:
        for name in ("low", "mid", "high"):
            g = report.groups[name]
            print(f"{name:>4}: mean |rel err| {g.mean_abs_rel_error:.1%}, "
                  f"mean rel err {g.mean_rel_error:+.1%} "
                  f"({len(g.algorithm_ids)} algorithms)")
        verdict = ("differences detected" if report.any_significant
                   else "no significant differences")
        print(f"{verdict} at p={report.alpha}")
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="benchsel",
        description="Compress a benchmark suite into small representative "
                    "environment subsets and apply the resulting models.")
    parser.add_argument("--version", action="version",
                        version=f"benchsel {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", help="exhaustively score subsets of one size")
    _add_io_flags(p)
    _add_dataset_flags(p)
    _add_search_flags(p)
    p.add_argument("--intercept", action="store_true",
                   help="fit subset->summary models with an intercept "
                        "(default off: a random policy scores 0)")
    p.add_argument("--size", type=int, required=True, help="subset size")
    p.add_argument("--include", action="append", default=[],
                   help="environment that must appear (repeatable or "
                        "comma-separated)")
    p.add_argument("--exclude", action="append", default=[],
                   help="environment to exclude (repeatable or "
                        "comma-separated)")
    p.add_argument("--top-k", type=int, default=100,
                   help="ranked results to keep")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("pipeline",
                       help="run the nested subset-selection pipeline")
    _add_io_flags(p)
    _add_dataset_flags(p)
    _add_search_flags(p)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("predict",
                       help="apply a fitted model to raw scores")
    _add_io_flags(p)
    p.add_argument("--model", required=True,
                   help="model file, or a shipped reference model name "
                        f"({', '.join(fixtures.SUBSET_MODEL_NAMES)})")
    p.add_argument("--true-summary", default=None,
                   help="column in the score CSV holding true summaries")
    p.add_argument("--baseline", default=None,
                   help="algorithm to rebase all summaries against")
    p.add_argument("--strict", action="store_true",
                   help="turn checksum mismatches into errors")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("analyze", help="diagnostic analyses")
    asub = p.add_subparsers(dest="analysis", required=True)

    q = asub.add_parser("rank-single",
                        help="rank single environments by predictive power")
    _add_io_flags(q)
    _add_dataset_flags(q)
    q.set_defaults(func=cmd_analyze_rank_single)

    q = asub.add_parser("correlate",
                        help="pairwise correlation structure")
    _add_io_flags(q)
    _add_dataset_flags(q)
    q.add_argument("--threshold", type=float, default=0.9,
                   help="PCC above this is tagged highly correlated")
    q.add_argument("--top", type=int, default=24,
                   help="number of top pairs to keep")
    q.add_argument("--dot", default=None,
                   help="also write a DOT graph document here")
    q.add_argument("--categories",
                   default=str(fixtures.categories_path()),
                   help="category sidecar CSV (environment,category)")
    q.set_defaults(func=cmd_analyze_correlate)

    q = asub.add_parser("fairness",
                        help="tertile accuracy/bias audit of a model")
    _add_io_flags(q)
    q.add_argument("--model", required=True,
                   help="model file or shipped reference model name")
    q.add_argument("--true-summary", default=None,
                   help="column holding true summaries; computed from the "
                        "table when omitted")
    q.add_argument("--min-games", type=int, default=40,
                   help="min present scores for a usable true summary")
    q.add_argument("--target", choices=("median", "mean"), default="median")
    q.add_argument("--ignore-columns", default="",
                   help="comma-separated non-score columns to ignore")
    q.add_argument("--alpha", type=float, default=0.05,
                   help="significance threshold")
    q.set_defaults(func=cmd_analyze_fairness)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BenchselError as exc:
        print(f"benchsel: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"benchsel: error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
