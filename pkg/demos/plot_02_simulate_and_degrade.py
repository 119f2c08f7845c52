"""
A simulated troop and its sparse field-like version
===================================================

The simulator moves 14 foragers over an arena of food patches.  An agent
that finds itself isolated (associates spread out but all to one side)
heads for the group's circular mean direction instead of foraging.  The
behaviour log records that choice, which later serves as ground truth.
"""

from forcematch import SimConfig, degrade, ground_truth_activation, simulate
from forcematch.sparsifier import FIELD_REVISITS, mean_revisit_time

data, log = simulate(SimConfig(duration=6 * 3600.0, seed=0))
print(len(data), "agents,", len(data["0"]), "fixes each")
print("agent 0 in cohesion mode on", f"{100 * ground_truth_activation(log, '0'):.2f}% of steps")

###############################################################################
# Field observers revisit each animal every few minutes.  Revisit times
# follow a lognormal law whose log has mean 6.1 and spread 0.6, a mean of
# about 534 s.

sparse = degrade(data, FIELD_REVISITS, seed=0)
print(len(sparse["0"]), "fixes kept for agent 0")
print(f"mean revisit {mean_revisit_time(sparse):.0f} s (analytic {FIELD_REVISITS.mean:.0f} s)")
