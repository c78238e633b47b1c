"""Exhaustive subset search: plant a 3-environment signal in a 20-environment
table and watch the search dig it out of all C(20,3) = 1140 candidates.
"""
import numpy as np

from benchsel.data import FilterConfig, PreparedDataset
from benchsel.search import SearchConfig, enumerate_and_score

rng = np.random.default_rng(7)
m, n = 60, 20
names = tuple(f"env{j + 1:02d}" for j in range(n))
log_scores = rng.uniform(0.0, 3.0, size=(m, n))
targets = (0.4 * log_scores[:, 2] + 0.5 * log_scores[:, 6]
           + 0.1 * log_scores[:, 11] + rng.normal(0.0, 0.02, size=m))

dataset = PreparedDataset(
    algorithm_ids=tuple(f"algo{i:02d}" for i in range(m)),
    environment_ids=names,
    log_scores=log_scores,
    targets=targets,
    target_stat="median",
    filter_config=FilterConfig(1, 1),
)

config = SearchConfig(subset_size=3, folds=10, seed=0, top_k=5)
result = enumerate_and_score(dataset, config, threads=1)

print(f"scored {result.scored} of {result.total_candidates} candidates "
      f"({result.skipped_insufficient_rows} skipped)")
print("top five subsets by cross-validated mse:")
for rank, cand in enumerate(result.ranked, start=1):
    print(f"  {rank}. {', '.join(cand.subset):<24} "
          f"cv_mse={cand.cv_mse:.6f}  r2={cand.model.stats.r_squared:.4f}")

best = result.best
print("\nrecovered weights on the winning subset "
      f"(true: 0.4 / 0.5 / 0.1): {np.round(best.model.coefficients, 4)}")
