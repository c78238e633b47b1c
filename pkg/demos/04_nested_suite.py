"""The nested selection pipeline: one ordered family of subset models.

The searches are ordered so that the small subsets sit inside the larger
ones (size-1 inside size-3 inside size-5 inside size-10) while separate
validation sets stay disjoint from the size-5 test set. That way a result
produced on the small set can always be upgraded later without touching
held-out games.
"""
import numpy as np

from benchsel.data import FilterConfig, PreparedDataset
from benchsel.search import nested_pipeline, per_game_models, \
    variance_explained

rng = np.random.default_rng(11)
m, n = 55, 18
names = tuple(f"env{j + 1:02d}" for j in range(n))
# correlated environment blocks make some games genuinely redundant
latent = rng.uniform(0.0, 2.5, size=(m, 6))
mix = rng.uniform(0.0, 1.0, size=(6, n)) * (rng.random((6, n)) < 0.4)
mix[rng.integers(0, 6, n), np.arange(n)] = 1.0
log_scores = np.clip(latent @ mix + rng.normal(0, 0.1, (m, n)), 0.0, None)
targets = np.median(log_scores, axis=1)

dataset = PreparedDataset(
    algorithm_ids=tuple(f"algo{i:02d}" for i in range(m)),
    environment_ids=names,
    log_scores=log_scores,
    targets=targets,
    target_stat="median",
    filter_config=FilterConfig(1, 1),
)

suite = nested_pipeline(dataset, folds=10, seed=0, threads=1)
for name in ("size-1", "size-3", "size-5", "size-10", "val-3", "val-5"):
    cand = suite.models[name]
    print(f"{name:<8} {', '.join(cand.subset):<60} "
          f"cv_mse={cand.cv_mse:.5f}")

bank = per_game_models(dataset, suite.subset("size-5"))
print(f"\nper-game bank from the size-5 subset: {len(bank.models)} models, "
      f"{len(bank.skipped)} unusable")
print("variance explained across all environments:",
      f"{variance_explained(bank, dataset):.1%}")
