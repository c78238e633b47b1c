import numpy as np
import pytest

from benchsel.data import FilterConfig, PreparedDataset


def silent(done, total):
    """Progress sink for searches under test."""


def make_dataset(m=40, n=16, seed=0, signal=None, noise=0.02,
                 missing_fraction=0.0):
    """Synthetic PreparedDataset with a known linear target.

    ``signal`` maps column index -> coefficient; the target is the signal
    combination of those columns plus Gaussian noise. Environment names are
    env01..envNN (1-based, so column j is named env{j+1:02d}).
    """
    rng = np.random.default_rng(seed)
    X = rng.uniform(0.0, 3.0, size=(m, n))
    if missing_fraction:
        holes = rng.random((m, n)) < missing_fraction
        # keep every row/column well populated
        holes[:, 0] = False
        holes[0, :] = False
        X = np.where(holes, np.nan, X)
    signal = signal or {0: 1.0}
    t = sum(w * np.nan_to_num(X[:, j], nan=0.0) for j, w in signal.items())
    t = t + rng.normal(0.0, noise, size=m)
    return PreparedDataset(
        algorithm_ids=tuple(f"algo{i:02d}" for i in range(m)),
        environment_ids=tuple(f"env{j + 1:02d}" for j in range(n)),
        log_scores=X,
        targets=t,
        target_stat="median",
        filter_config=FilterConfig(1, 1),
    )


@pytest.fixture
def scores_csv(tmp_path):
    """Write a raw score CSV and return its path."""

    def _write(rows, header, name="scores.csv"):
        path = tmp_path / name
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join("" if c is None else str(c) for c in row))
                fh.write("\n")
        return path

    return _write


@pytest.fixture
def norms_csv(tmp_path):
    """Write a normalization CSV and return its path."""

    def _write(entries, name="norms.csv"):
        path = tmp_path / name
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("environment,random,human\n")
            for env, rnd, hum in entries:
                fh.write(f"{env},{rnd},{hum}\n")
        return path

    return _write
