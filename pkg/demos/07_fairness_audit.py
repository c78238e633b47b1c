"""Fairness audit: do subset-score predictions treat weak and strong
algorithms differently?

Algorithms are split into performance tertiles by their true summary; the
audit compares mean absolute relative error (accuracy) and mean signed
relative error (bias) across the groups with Welch two-sided t-tests.
"""
import numpy as np

from benchsel.analysis import fairness_report
from benchsel.predict import make_report

rng = np.random.default_rng(33)

# an unbiased predictor: multiplicative noise independent of skill
truths = np.sort(rng.uniform(20.0, 2000.0, size=30))
fair = [make_report(f"algo{i:02d}", t * rng.lognormal(0.0, 0.08),
                    true_summary=float(t))
        for i, t in enumerate(truths)]
audit = fairness_report(fair)
print("unbiased predictor:")
for name, g in audit.groups.items():
    print(f"  {name:>4}: |rel err| {g.mean_abs_rel_error:.1%}   "
          f"bias {g.mean_rel_error:+.1%}")
print("  any significant difference?", audit.any_significant)

# a predictor that systematically shortchanges the strongest algorithms
unfair = [make_report(f"algo{i:02d}",
                      t * rng.lognormal(0.0, 0.05)
                      * (0.75 if i >= 20 else 1.0),
                      true_summary=float(t))
          for i, t in enumerate(truths)]
audit = fairness_report(unfair)
print("\npredictor that underestimates the top tertile:")
for name, g in audit.groups.items():
    print(f"  {name:>4}: |rel err| {g.mean_abs_rel_error:.1%}   "
          f"bias {g.mean_rel_error:+.1%}")
for pair, test in audit.pairwise.items():
    flag = " *" if test.significant_signed else ""
    print(f"  {pair[0]:>4} vs {pair[1]:<4} bias t={test.t_signed:+.2f} "
          f"p={test.p_signed:.4f}{flag}")
