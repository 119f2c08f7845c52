"""Thin dense tracks into field-like sparse observations.

Revisit intervals between successive fixes of one individual are drawn from a
lognormal distribution, and each target time is snapped to the nearest
recorded fix, so the output is a strict subset of the input.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass

import numpy as np

from .core import GroupDataset, Trajectory
from .errors import EmptyTrajectory, ValidationError


@dataclass(frozen=True)
class RevisitDistribution:
    """Lognormal revisit time in seconds: ``log(T) ~ Normal(meanlog, sdlog)``."""

    meanlog: float
    sdlog: float

    def __post_init__(self):
        if not self.sdlog > 0:
            raise ValidationError("sdlog must be positive")
        if not math.isfinite(self.meanlog):
            raise ValidationError("meanlog must be finite")

    @property
    def mean(self) -> float:
        return math.exp(self.meanlog + self.sdlog**2 / 2)

    @property
    def median(self) -> float:
        return math.exp(self.meanlog)

    def sample(self, rng: np.random.Generator, size=None):
        return rng.lognormal(self.meanlog, self.sdlog, size)


#: Field revisit distribution fitted to hand-held GPS follows (mean ~8.9 min).
FIELD_REVISITS = RevisitDistribution(6.1, 0.6)


def distribution_for_target_mean(target_mean: float, sdlog: float = 0.6) -> RevisitDistribution:
    """Lognormal with the given mean (minutes) and log-scale spread."""
    if not target_mean > 0:
        raise ValidationError("target_mean must be positive")
    return RevisitDistribution(math.log(60.0 * target_mean) - sdlog**2 / 2, sdlog)


def individual_seed(seed: int, individual_id) -> np.random.SeedSequence:
    """Per-individual stream, independent of processing order."""
    return np.random.SeedSequence([int(seed), zlib.crc32(str(individual_id).encode())])


def degrade_trajectory(traj: Trajectory, dist: RevisitDistribution, rng: np.random.Generator) -> Trajectory:
    """Subsample one trajectory with lognormal revisit times."""
    t = traj.t
    if len(t) < 2:
        raise EmptyTrajectory(f"{traj.individual_id!r} has fewer than 2 fixes")
    keep = [0]
    current = 0
    t_end = t[-1]
    while True:
        target = t[current] + dist.sample(rng)
        if target > t_end:
            break
        j = int(np.searchsorted(t, target))
        if j >= len(t):
            j = len(t) - 1
        elif j > 0 and target - t[j - 1] <= t[j] - target:
            j -= 1
        if j > current:
            keep.append(j)
            current = j
    if len(keep) < 2:
        keep.append(len(t) - 1)
    return traj.subset(np.array(keep))


def degrade(data: GroupDataset, dist: RevisitDistribution, seed: int = 0) -> GroupDataset:
    """Independently thin every individual of ``data``.

    Each individual starts at its first fix and repeatedly jumps ahead by a
    lognormal draw, keeping the fix nearest to the target time, until the
    span is used up.  Draws that land on the already-kept fix are discarded.
    """
    out = {}
    for aid in data.ids:
        rng = np.random.default_rng(individual_seed(seed, aid))
        out[aid] = degrade_trajectory(data[aid], dist, rng)
    return GroupDataset(out, crs_note=data.crs_note)


def mean_revisit_time(data: GroupDataset) -> float:
    """Mean interval between successive fixes, pooled over individuals."""
    gaps = np.concatenate([np.diff(data[a].t) for a in data.ids])
    return float(gaps.mean()) if gaps.size else float("nan")
