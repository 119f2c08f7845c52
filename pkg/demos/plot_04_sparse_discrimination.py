"""
Group or individuals from sparse data
=====================================

At a 10-minute mean revisit time only a few hundred rows survive per
focal animal.  The question is no longer where the thresholds sit but
which hypothesis carries the weight: the group's mean direction or
attraction to particular associates.  Bootstrap percentile intervals show
how firmly each weight is pinned down.
"""

from forcematch import (
    BootstrapConfig,
    DEConfig,
    SimConfig,
    bootstrap_ci,
    degrade,
    distribution_for_target_mean,
    extract_design_rows,
    fit,
    form_for,
    simulate,
)

data, _ = simulate(SimConfig(duration=48 * 3600.0, seed=0))
sparse = degrade(data, distribution_for_target_mean(10), seed=0)
rows = extract_design_rows(sparse, "0")
form = form_for(rows, "eq2")
res = fit(rows, form, config=DEConfig(seed=0))
print(len(rows), "rows; beta_cm =", round(res.weights.beta_cm, 3))
print("largest associate weight:", round(max(res.weights.beta_assoc.values()), 3))

###############################################################################
# A short bootstrap (50 replicates with a reduced optimiser budget) for a
# first look at the intervals.

boot = bootstrap_ci(rows, form, config=BootstrapConfig(replicates=50, seed=0))
for name in ("beta_prev", "beta_cm", "beta_1", "beta_2"):
    lo, hi = boot.intervals[name]
    print(f"{name:>9s}  {res.parameters()[name]:.3f}  ({lo:.3f}, {hi:.3f})")
