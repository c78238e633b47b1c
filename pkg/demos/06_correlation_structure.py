"""Correlation structure between environments, and the DOT export.

Highly correlated environment pairs are what make small representative
subsets possible in the first place: if two games always move together,
one of them carries almost no extra information.
"""
import numpy as np

from benchsel.analysis import correlated_pairs, export_dot, pearson_matrix
from benchsel.data import FilterConfig, PreparedDataset

rng = np.random.default_rng(21)
m = 40
# three latent skills, nine observed environments
skill = rng.uniform(0.0, 2.0, size=(m, 3))
loadings = np.array([
    [1.0, 0.0, 0.0], [0.9, 0.1, 0.0], [0.8, 0.0, 0.2],   # cluster A
    [0.0, 1.0, 0.0], [0.1, 0.9, 0.0],                     # cluster B
    [0.0, 0.0, 1.0], [0.0, 0.2, 0.8],                     # cluster C
    [0.4, 0.4, 0.2], [0.3, 0.3, 0.4],                     # mixtures
])
names = tuple(f"game{chr(ord('A') + j)}" for j in range(9))
log_scores = np.clip(skill @ loadings.T + rng.normal(0, 0.08, (m, 9)),
                     0.0, None)

dataset = PreparedDataset(
    algorithm_ids=tuple(f"algo{i:02d}" for i in range(m)),
    environment_ids=names,
    log_scores=log_scores,
    targets=np.median(log_scores, axis=1),
    target_stat="median",
    filter_config=FilterConfig(1, 1),
)

graph = pearson_matrix(dataset)
pairs = correlated_pairs(graph, threshold=0.9, top_n=10)
print("top correlated pairs:")
for p in pairs:
    tag = "  << highly correlated" if p.highly_correlated else ""
    print(f"  {p.env_a:<7} {p.env_b:<7} pcc={p.pcc:+.3f}{tag}")

categories = {names[j]: f"cluster-{'ABC'[int(np.argmax(loadings[j]))]}"
              for j in range(9)}
doc = export_dot(pairs, categories)
print("\nDOT document (feed to `neato -Tpng`):\n")
print(doc)
