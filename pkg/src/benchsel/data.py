"""Score-table ingestion, normalization, and the log-score transform.

Raw benchmark results enter as an algorithms x environments CSV with
optional gaps. This module turns them into the log-normalized matrix and
per-algorithm target vector that every downstream fit consumes:

    raw score -> Z = 100 * (x - random) / (human - random)
              -> phi(Z) = log10(1 + max(0, Z))

Missing entries stay missing throughout; nothing is imputed.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    DegenerateDataError,
    EnvironmentLookupError,
    SchemaError,
    ValidationError,
)

TARGET_STATS = ("median", "mean")

_CANON_RE = re.compile(r"[^0-9a-z]+")


def canonical_key(name: str) -> str:
    """Lower-case an environment name and drop spaces, asterisks and punctuation.

    "Q*Bert", "QBert" and "q bert" all map to "qbert"; the display spelling
    is taken from whichever table is declared canonical (the normalization
    table, for full pipelines).
    """
    return _CANON_RE.sub("", name.casefold())


class FilterConfig(NamedTuple):
    min_games: int
    min_algorithms: int


class NormEntry(NamedTuple):
    name: str
    random: float
    human: float


@dataclass(frozen=True)
class RawScoreTable:
    """Algorithms x environments matrix of raw game scores.

    ``scores[i, j]`` is the raw score of algorithm i on environment j, with
    NaN marking a missing entry. Present entries are finite reals.
    """

    algorithm_ids: tuple[str, ...]
    environment_ids: tuple[str, ...]
    scores: np.ndarray
    provenance: tuple[str | None, ...] | None = None

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        object.__setattr__(self, "scores", scores)
        m, n = len(self.algorithm_ids), len(self.environment_ids)
        if scores.shape != (m, n):
            raise ValidationError(
                f"score matrix is {scores.shape}, expected ({m}, {n})")
        if len(set(self.algorithm_ids)) != m:
            raise ValidationError("duplicate algorithm id in score table")
        _check_unique_environments(self.environment_ids)
        if np.isinf(scores).any():
            raise ValidationError("score table contains non-finite entries")
        if self.provenance is not None and len(self.provenance) != m:
            raise ValidationError("provenance must have one entry per algorithm")
        scores.flags.writeable = False

    @property
    def present(self) -> np.ndarray:
        """Boolean mask of available entries."""
        return ~np.isnan(self.scores)

    @property
    def n_algorithms(self) -> int:
        return len(self.algorithm_ids)

    @property
    def n_environments(self) -> int:
        return len(self.environment_ids)


@dataclass(frozen=True)
class NormalizationTable:
    """Per-environment random and human reference scores."""

    entries: dict[str, NormEntry]  # canonical key -> entry

    def __post_init__(self):
        for entry in self.entries.values():
            if entry.human == entry.random:
                raise ValidationError(
                    f"environment {entry.name!r}: human and random scores are "
                    "equal, normalization undefined")

    @classmethod
    def from_pairs(cls, pairs) -> "NormalizationTable":
        """Build from an iterable of (name, random, human) triples."""
        entries: dict[str, NormEntry] = {}
        for name, random, human in pairs:
            key = canonical_key(name)
            if key in entries:
                raise ValidationError(f"duplicate environment {name!r} in "
                                      "normalization table")
            entries[key] = NormEntry(name, float(random), float(human))
        return cls(entries)

    def lookup(self, environment: str) -> NormEntry:
        try:
            return self.entries[canonical_key(environment)]
        except KeyError:
            raise EnvironmentLookupError(
                environment,
                f"environment {environment!r} not in normalization table") from None

    def __contains__(self, environment: str) -> bool:
        return canonical_key(environment) in self.entries

    @property
    def environment_ids(self) -> tuple[str, ...]:
        return tuple(e.name for e in self.entries.values())


@dataclass(frozen=True)
class PreparedDataset:
    """Log-normalized score matrix plus per-algorithm targets.

    ``log_scores[i, j]`` is phi(Z) for algorithm i on environment j (NaN if
    missing); ``targets[i]`` is phi of the algorithm's summary statistic
    over its present normalized scores.
    """

    algorithm_ids: tuple[str, ...]
    environment_ids: tuple[str, ...]
    log_scores: np.ndarray
    targets: np.ndarray
    target_stat: str
    filter_config: FilterConfig

    def __post_init__(self):
        log_scores = np.asarray(self.log_scores, dtype=np.float64)
        targets = np.asarray(self.targets, dtype=np.float64)
        object.__setattr__(self, "log_scores", log_scores)
        object.__setattr__(self, "targets", targets)
        m, n = len(self.algorithm_ids), len(self.environment_ids)
        if log_scores.shape != (m, n):
            raise ValidationError(
                f"log-score matrix is {log_scores.shape}, expected ({m}, {n})")
        if targets.shape != (m,):
            raise ValidationError("targets must have one value per algorithm")
        if not np.isfinite(targets).all():
            raise ValidationError("targets contain non-finite values")
        if self.target_stat not in TARGET_STATS:
            raise ValidationError(f"target_stat must be one of {TARGET_STATS}")
        if len(set(self.algorithm_ids)) != m:
            raise ValidationError("duplicate algorithm id in prepared dataset")
        _check_unique_environments(self.environment_ids)
        present = ~np.isnan(log_scores)
        with np.errstate(invalid="ignore"):
            if bool((log_scores[present] < 0).any()):
                raise ValidationError("log scores must be non-negative "
                                      "(clipping happens before the log)")
        min_games, min_algorithms = self.filter_config
        games_per_algo = present.sum(axis=1)
        if m and games_per_algo.min() < min_games:
            worst = self.algorithm_ids[int(games_per_algo.argmin())]
            raise ValidationError(
                f"algorithm {worst!r} has fewer than {min_games} scores")
        algos_per_env = present.sum(axis=0)
        if n and algos_per_env.min() < min_algorithms:
            worst = self.environment_ids[int(algos_per_env.argmin())]
            raise ValidationError(
                f"environment {worst!r} has fewer than {min_algorithms} scores")
        log_scores.flags.writeable = False
        targets.flags.writeable = False

    @property
    def present(self) -> np.ndarray:
        return ~np.isnan(self.log_scores)

    @property
    def n_algorithms(self) -> int:
        return len(self.algorithm_ids)

    @property
    def n_environments(self) -> int:
        return len(self.environment_ids)

    def environment_index(self, environment: str) -> int:
        key = canonical_key(environment)
        for j, name in enumerate(self.environment_ids):
            if canonical_key(name) == key:
                return j
        raise EnvironmentLookupError(environment)

    def content_hash(self) -> str:
        """Stable hex digest of ids, matrix and targets, for manifests."""
        import hashlib

        h = hashlib.sha256()
        h.update("\x1f".join(self.algorithm_ids).encode())
        h.update("\x1e".encode())
        h.update("\x1f".join(self.environment_ids).encode())
        h.update(self.log_scores.tobytes())
        h.update(self.targets.tobytes())
        h.update(f"{self.target_stat}:{self.filter_config}".encode())
        return h.hexdigest()


def _check_unique_environments(environment_ids) -> None:
    seen: dict[str, str] = {}
    for name in environment_ids:
        key = canonical_key(name)
        if key in seen:
            raise ValidationError(
                f"duplicate environment: {name!r} collides with {seen[key]!r}")
        seen[key] = name


def load_scores(path) -> RawScoreTable:
    """Read a raw score CSV: header ``algorithm,<env_1>,...``, one row per
    algorithm, empty cell = missing score.

    A column named ``provenance`` (any case) is diverted into the
    per-algorithm provenance tag instead of the score matrix.
    """
    table, _ = load_scores_with_values(path)
    return table


def load_scores_with_values(path, value_columns=()
                            ) -> tuple[RawScoreTable, dict[str, dict]]:
    """Like :func:`load_scores`, but diverts the named columns out of the
    score matrix and returns them as ``{column: {algorithm: value|None}}``
    (for score files that carry, say, a true-summary column).
    """
    value_keys = {canonical_key(c): c for c in value_columns}
    with open(path, newline="", encoding="utf-8-sig") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError(f"{path}: empty file")
    header = [cell.strip() for cell in rows[0]]
    if not header or header[0].casefold() != "algorithm":
        raise SchemaError(f"{path}: first header column must be 'algorithm', "
                          f"got {header[0] if header else ''!r}")
    prov_col = None
    env_cols: list[tuple[int, str]] = []
    value_cols: dict[str, int] = {}
    for j, name in enumerate(header[1:], start=1):
        if name.casefold() == "provenance":
            if prov_col is not None:
                raise SchemaError(f"{path}: multiple provenance columns")
            prov_col = j
        elif canonical_key(name) in value_keys:
            value_cols[value_keys[canonical_key(name)]] = j
        elif not name:
            raise SchemaError(f"{path}: empty environment name in column {j + 1}")
        else:
            env_cols.append((j, name))
    missing_values = sorted(set(value_keys.values()) - set(value_cols))
    if missing_values:
        raise SchemaError(f"{path}: no column named {missing_values[0]!r}")
    environment_ids = tuple(name for _, name in env_cols)
    try:
        _check_unique_environments(environment_ids)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None

    algorithm_ids: list[str] = []
    provenance: list[str | None] = []
    values: dict[str, dict] = {c: {} for c in value_cols}
    scores = np.full((len(rows) - 1, len(env_cols)), np.nan)
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise SchemaError(f"{path}: row {i} has {len(row)} cells, "
                              f"expected {len(header)}")
        name = row[0].strip()
        if not name:
            raise SchemaError(f"{path}: row {i} has an empty algorithm name")
        algorithm_ids.append(name)
        provenance.append(row[prov_col].strip() or None
                          if prov_col is not None else None)
        for column, j in value_cols.items():
            cell = row[j].strip()
            if not cell:
                values[column][name] = None
                continue
            try:
                values[column][name] = float(cell)
            except ValueError:
                raise SchemaError(f"{path}: row {i}, column {column!r}: "
                                  f"cannot parse {cell!r} as a number") from None
        for k, (j, env) in enumerate(env_cols):
            cell = row[j].strip()
            if not cell:
                continue
            try:
                value = float(cell)
            except ValueError:
                raise SchemaError(f"{path}: row {i}, column {env!r}: "
                                  f"cannot parse {cell!r} as a number") from None
            if not np.isfinite(value):
                raise SchemaError(f"{path}: row {i}, column {env!r}: "
                                  f"non-finite score {cell!r}")
            scores[i - 2, k] = value
    if len(set(algorithm_ids)) != len(algorithm_ids):
        dupe = next(a for a in algorithm_ids if algorithm_ids.count(a) > 1)
        raise ValidationError(f"{path}: duplicate algorithm {dupe!r}")
    table = RawScoreTable(
        algorithm_ids=tuple(algorithm_ids),
        environment_ids=environment_ids,
        scores=scores,
        provenance=tuple(provenance) if prov_col is not None else None,
    )
    return table, values


def load_norms(path) -> NormalizationTable:
    """Read a normalization CSV: header ``environment,random,human``."""
    with open(path, newline="", encoding="utf-8-sig") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError(f"{path}: empty file")
    header = [cell.strip().casefold() for cell in rows[0]]
    if header[:3] != ["environment", "random", "human"]:
        raise SchemaError(f"{path}: header must be environment,random,human")
    pairs = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) < 3:
            raise SchemaError(f"{path}: row {i} has fewer than 3 cells")
        name = row[0].strip()
        if not name:
            raise SchemaError(f"{path}: row {i} has an empty environment name")
        try:
            random, human = float(row[1]), float(row[2])
        except ValueError:
            raise SchemaError(f"{path}: row {i}: cannot parse reference "
                              "scores as numbers") from None
        if not (np.isfinite(random) and np.isfinite(human)):
            raise SchemaError(f"{path}: row {i}: non-finite reference score")
        pairs.append((name, random, human))
    try:
        return NormalizationTable.from_pairs(pairs)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def normalize(raw: RawScoreTable, norms: NormalizationTable) -> np.ndarray:
    """Map raw scores to the 0-100 scale: Z = 100 * (x - r) / (h - r).

    The random reference maps to 0 and the human reference to 100 exactly;
    scores above human stay above 100 (never capped). Missing entries stay
    NaN. Raises if an environment has no normalization entry.
    """
    out = np.empty_like(raw.scores)
    for j, env in enumerate(raw.environment_ids):
        entry = norms.lookup(env)
        # divide before scaling so the reference anchors land exactly on
        # 0 and 100 (the ratio is exactly 0.0 or 1.0 in either case)
        out[:, j] = (raw.scores[:, j] - entry.random) / (
            entry.human - entry.random) * 100.0
    return out


def log_transform(x):
    """phi(x) = log10(1 + max(0, x)); accepts scalars or arrays.

    Negative inputs (scores slightly worse than the random reference) clip
    to 0, so the result is always >= 0. NaN passes through.
    """
    return np.log10(1.0 + np.maximum(0.0, x))


def inverse_log_transform(y):
    """phi^-1(y) = 10**y - 1; inverse of :func:`log_transform` on x >= 0."""
    return np.power(10.0, y) - 1.0


def filter_dataset(raw: RawScoreTable, min_games: int,
                   min_algorithms: int) -> RawScoreTable:
    """Drop sparse rows then sparse columns, in that order.

    First removes algorithms with fewer than ``min_games`` present scores,
    then removes environments with fewer than ``min_algorithms`` present
    scores among the retained algorithms. The two passes run exactly once
    (not iterated to a fixed point).
    """
    if min_games < 1 or min_algorithms < 1:
        raise ValidationError("filter thresholds must be >= 1")
    present = raw.present
    keep_algos = present.sum(axis=1) >= min_games
    keep_envs = present[keep_algos].sum(axis=0) >= min_algorithms
    if not keep_algos.any() or not keep_envs.any():
        raise DegenerateDataError(
            f"filtering at min_games={min_games}, "
            f"min_algorithms={min_algorithms} leaves an empty table")
    algo_idx = np.flatnonzero(keep_algos)
    env_idx = np.flatnonzero(keep_envs)
    return RawScoreTable(
        algorithm_ids=tuple(raw.algorithm_ids[i] for i in algo_idx),
        environment_ids=tuple(raw.environment_ids[j] for j in env_idx),
        scores=raw.scores[np.ix_(algo_idx, env_idx)],
        provenance=(tuple(raw.provenance[i] for i in algo_idx)
                    if raw.provenance is not None else None),
    )


def compute_target(normalized: np.ndarray, stat: str = "median") -> np.ndarray:
    """Per-algorithm target: phi(stat over the row's present normalized scores).

    The statistic is taken over available entries only (nothing imputed);
    an even-count median is the midpoint of the two central values. The
    result is in log-normalized units, i.e. phi is applied to the summary,
    not to the individual scores first.
    """
    if stat not in TARGET_STATS:
        raise ValidationError(f"target stat must be one of {TARGET_STATS}")
    normalized = np.asarray(normalized, dtype=np.float64)
    counts = (~np.isnan(normalized)).sum(axis=1)
    if normalized.shape[0] and counts.min() < 1:
        raise DegenerateDataError(
            f"algorithm at row {int(counts.argmin())} has no present scores")
    reduce = np.nanmedian if stat == "median" else np.nanmean
    return np.asarray(log_transform(reduce(normalized, axis=1)))


def prepare_dataset(raw: RawScoreTable, norms: NormalizationTable, *,
                    min_games: int = 40, min_algorithms: int = 40,
                    target_stat: str = "median") -> PreparedDataset:
    """Full ingestion pipeline: filter, normalize, log-transform, target.

    Environment ids in the result use the normalization table's spelling
    (the canonical form). Filtering happens on the raw table, before
    normalization, and targets are computed from each retained algorithm's
    present games only.
    """
    filtered = filter_dataset(raw, min_games, min_algorithms)
    normalized = normalize(filtered, norms)
    canonical_ids = tuple(norms.lookup(e).name for e in filtered.environment_ids)
    return PreparedDataset(
        algorithm_ids=filtered.algorithm_ids,
        environment_ids=canonical_ids,
        log_scores=np.asarray(log_transform(normalized)),
        targets=compute_target(normalized, target_stat),
        target_stat=target_stat,
        filter_config=FilterConfig(min_games, min_algorithms),
    )
