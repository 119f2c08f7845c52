"""Turn group trajectories into focal design rows.

For every interior fix of a focal individual we record its observed heading
(to the next fix), its previous heading (from the preceding fix), and the
positions of all associates linearly interpolated at that instant.  Rows are
stored column-wise in :class:`DesignRows`; indexing yields :class:`DesignRow`
records.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import GroupDataset, Trajectory, group_geometry, id_sort_key, wrap_angle
from .errors import FocalNotFound, OutOfRange, TooFewFixes, ValidationError


@dataclass(frozen=True)
class ExtractionOptions:
    """Row filters.  ``None`` disables a gap filter."""

    min_step: float = 0.1
    max_dt_next: float | None = None
    max_dt_prev: float | None = None
    max_interpolation_gap: float | None = None
    # keep rows whose previous step is stationary, with no previous bearing
    keep_stationary_prev: bool = False


@dataclass(frozen=True)
class AssociateState:
    individual_id: str
    direction_to: float | None
    distance: float
    travel_direction: float | None
    interpolation_gap: float


@dataclass(frozen=True)
class DesignRow:
    focal_id: str
    t: float
    observed_direction: float
    previous_bearing: float | None
    dt_next: float
    dt_prev: float
    associates: tuple
    da: float
    iid: float
    cm_direction: float | None


def _opt(v):
    return None if not np.isfinite(v) else float(v)


class DesignRows:
    """Column store of design rows for one focal individual.

    Associate quantities are ``(n_rows, n_associates)`` arrays aligned with
    ``associate_ids``; NaN marks an associate that is absent from a row (or,
    for ``assoc_dir``/``assoc_travel``, a direction that is undefined).
    """

    _fields = (
        "t", "observed", "previous", "dt_next", "dt_prev", "da", "iid", "cm",
        "assoc_dir", "assoc_dist", "assoc_travel", "assoc_gap",
    )

    def __init__(self, focal_id, associate_ids, *, t, observed, previous, dt_next,
                 dt_prev, da, iid, cm, assoc_dir, assoc_dist, assoc_travel=None,
                 assoc_gap=None):
        self.focal_id = str(focal_id)
        self.associate_ids = tuple(str(a) for a in associate_ids)
        n, m = len(t), len(self.associate_ids)
        self.t = np.asarray(t, dtype=float)
        self.observed = np.asarray(observed, dtype=float)
        self.previous = np.asarray(previous, dtype=float)
        self.dt_next = np.asarray(dt_next, dtype=float)
        self.dt_prev = np.asarray(dt_prev, dtype=float)
        self.da = np.asarray(da, dtype=float)
        self.iid = np.asarray(iid, dtype=float)
        self.cm = np.asarray(cm, dtype=float)
        self.assoc_dir = np.asarray(assoc_dir, dtype=float).reshape(n, m)
        self.assoc_dist = np.asarray(assoc_dist, dtype=float).reshape(n, m)
        self.assoc_travel = (np.full((n, m), np.nan) if assoc_travel is None
                             else np.asarray(assoc_travel, dtype=float).reshape(n, m))
        self.assoc_gap = (np.full((n, m), np.nan) if assoc_gap is None
                          else np.asarray(assoc_gap, dtype=float).reshape(n, m))
        for name in self._fields[:8]:
            if getattr(self, name).shape != (n,):
                raise ValidationError(f"column {name} has the wrong length")

    def __len__(self):
        return len(self.t)

    def __getitem__(self, i) -> DesignRow:
        if isinstance(i, slice) or not np.isscalar(i):
            return self.take(np.arange(len(self))[i])
        assoc = tuple(
            AssociateState(aid, _opt(self.assoc_dir[i, j]), float(self.assoc_dist[i, j]),
                           _opt(self.assoc_travel[i, j]), float(self.assoc_gap[i, j]))
            for j, aid in enumerate(self.associate_ids)
            if np.isfinite(self.assoc_dist[i, j])
        )
        return DesignRow(
            self.focal_id, float(self.t[i]), float(self.observed[i]), _opt(self.previous[i]),
            float(self.dt_next[i]), float(self.dt_prev[i]), assoc, float(self.da[i]),
            float(self.iid[i]), _opt(self.cm[i]),
        )

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def take(self, index) -> "DesignRows":
        """Rows at ``index`` (with repetition allowed, as for resampling)."""
        index = np.asarray(index, dtype=np.intp)
        cols = {name: getattr(self, name)[index] for name in self._fields}
        return DesignRows(self.focal_id, self.associate_ids, **cols)

    @classmethod
    def from_rows(cls, rows: Sequence[DesignRow], associate_ids=None) -> "DesignRows":
        rows = list(rows)
        if associate_ids is None:
            seen = {a.individual_id for r in rows for a in r.associates}
            associate_ids = sorted(seen, key=id_sort_key)
        focal = rows[0].focal_id if rows else ""
        col = {aid: j for j, aid in enumerate(associate_ids)}
        n, m = len(rows), len(associate_ids)
        arr = {k: np.full((n, m), np.nan) for k in ("assoc_dir", "assoc_dist", "assoc_travel", "assoc_gap")}
        for i, r in enumerate(rows):
            for a in r.associates:
                j = col[a.individual_id]
                arr["assoc_dir"][i, j] = np.nan if a.direction_to is None else a.direction_to
                arr["assoc_dist"][i, j] = a.distance
                arr["assoc_travel"][i, j] = np.nan if a.travel_direction is None else a.travel_direction
                arr["assoc_gap"][i, j] = a.interpolation_gap

        def nan_none(v):
            return np.nan if v is None else v

        return cls(
            focal, associate_ids,
            t=[r.t for r in rows], observed=[r.observed_direction for r in rows],
            previous=[nan_none(r.previous_bearing) for r in rows],
            dt_next=[r.dt_next for r in rows], dt_prev=[r.dt_prev for r in rows],
            da=[r.da for r in rows], iid=[r.iid for r in rows],
            cm=[nan_none(r.cm_direction) for r in rows], **arr,
        )

    def recompute_geometry(self):
        """DA, IID and CM direction recomputed from the associate columns."""
        present = np.isfinite(self.assoc_dist)
        dirs = np.where(np.isfinite(self.assoc_dir), self.assoc_dir, 0.0)
        dist = np.where(present, self.assoc_dist, 0.0)
        dx = np.where(np.isfinite(self.assoc_dir), np.cos(dirs) * dist, 0.0)
        dy = np.where(np.isfinite(self.assoc_dir), np.sin(dirs) * dist, 0.0)
        _, iid_sum, da, rx, ry, _ = group_geometry(dx, dy, present)
        return da, iid_sum, np.arctan2(ry, rx)


def _segment_lookup(traj: Trajectory, times: np.ndarray):
    """Segment index and validity for each query time.

    Exact hits on a fix use the following segment; the final fix uses the
    preceding one.
    """
    t = traj.t
    idx = np.searchsorted(t, times, side="right") - 1
    valid = (times >= t[0]) & (times <= t[-1]) & (len(t) >= 2)
    idx = np.clip(idx, 0, max(len(t) - 2, 0))
    return idx, valid


def _interpolate(traj: Trajectory, times):
    """Vectorised interpolation; returns x, y, heading, gap, valid."""
    times = np.asarray(times, dtype=float)
    idx, valid = _segment_lookup(traj, times)
    if len(traj) < 2:
        nan = np.full(times.shape, np.nan)
        return nan, nan, nan, nan, np.zeros(times.shape, bool)
    t0, t1 = traj.t[idx], traj.t[idx + 1]
    x0, x1 = traj.x[idx], traj.x[idx + 1]
    y0, y1 = traj.y[idx], traj.y[idx + 1]
    span = t1 - t0
    frac = (times - t0) / span
    x = np.where(times == t1, x1, x0 + frac * (x1 - x0))
    y = np.where(times == t1, y1, y0 + frac * (y1 - y0))
    x = np.where(times == t0, x0, x)
    y = np.where(times == t0, y0, y)
    sdx, sdy = x1 - x0, y1 - y0
    moving = np.sqrt(sdx * sdx + sdy * sdy) >= 1e-9
    heading = np.where(moving, np.arctan2(sdy, sdx), np.nan)
    nan = np.nan
    return (np.where(valid, x, nan), np.where(valid, y, nan),
            np.where(valid, wrap_angle(heading), nan), np.where(valid, span, nan), valid)


def interpolate_position(traj: Trajectory, t: float):
    """Position of ``traj`` at time ``t`` and the span of the segment used.

    Raises
    ------
    OutOfRange
        If ``t`` lies outside the observed span.
    """
    if len(traj) < 2:
        raise ValidationError("interpolation needs at least 2 fixes")
    x, y, _, gap, valid = _interpolate(traj, np.array([t]))
    if not valid[0]:
        raise OutOfRange(f"t={t} outside [{traj.t[0]}, {traj.t[-1]}] for {traj.individual_id!r}")
    return (float(x[0]), float(y[0])), float(gap[0])


def interpolate_direction(traj: Trajectory, t: float) -> float | None:
    """Heading of the segment bracketing ``t``; ``None`` if it is stationary."""
    if len(traj) < 2:
        raise ValidationError("interpolation needs at least 2 fixes")
    _, _, heading, _, valid = _interpolate(traj, np.array([t]))
    if not valid[0]:
        raise OutOfRange(f"t={t} outside [{traj.t[0]}, {traj.t[-1]}] for {traj.individual_id!r}")
    return None if math.isnan(heading[0]) else float(heading[0])


def extract_design_rows(data: GroupDataset, focal_id, options: ExtractionOptions | None = None) -> DesignRows:
    """Build the design rows of one focal individual.

    One row per interior focal fix whose next and previous steps are longer
    than ``options.min_step`` and at which at least one associate can be
    interpolated.
    """
    options = options or ExtractionOptions()
    focal_id = str(focal_id)
    if focal_id not in data.trajectories:
        raise FocalNotFound(f"focal individual {focal_id!r} not in dataset")
    focal = data[focal_id]
    if len(focal) < 3:
        raise TooFewFixes(f"focal {focal_id!r} has {len(focal)} fixes; at least 3 needed")
    associate_ids = [a for a in data.ids if a != focal_id]

    t, x, y = focal.t, focal.x, focal.y
    k = np.arange(1, len(t) - 1)
    tk, xk, yk = t[k], x[k], y[k]
    ndx, ndy = x[k + 1] - xk, y[k + 1] - yk
    pdx, pdy = xk - x[k - 1], yk - y[k - 1]
    next_step = np.sqrt(ndx * ndx + ndy * ndy)
    prev_step = np.sqrt(pdx * pdx + pdy * pdy)
    dt_next = t[k + 1] - tk
    dt_prev = tk - t[k - 1]

    keep = next_step >= max(options.min_step, 1e-9)
    prev_ok = prev_step >= max(options.min_step, 1e-9)
    if not options.keep_stationary_prev:
        keep &= prev_ok
    if options.max_dt_next is not None:
        keep &= dt_next <= options.max_dt_next
    if options.max_dt_prev is not None:
        keep &= dt_prev <= options.max_dt_prev

    m = len(associate_ids)
    n = len(k)
    adx = np.full((n, m), np.nan)
    ady = np.full((n, m), np.nan)
    travel = np.full((n, m), np.nan)
    gap = np.full((n, m), np.nan)
    for j, aid in enumerate(associate_ids):
        ax, ay, heading, g, valid = _interpolate(data[aid], tk)
        if options.max_interpolation_gap is not None:
            valid &= g <= options.max_interpolation_gap
        adx[:, j] = np.where(valid, ax - xk, np.nan)
        ady[:, j] = np.where(valid, ay - yk, np.nan)
        travel[:, j] = np.where(valid, heading, np.nan)
        gap[:, j] = np.where(valid, g, np.nan)

    present = np.isfinite(adx)
    keep &= present.any(axis=1)
    dist, iid_sum, da, rx, ry, _ = group_geometry(adx, ady, present)
    with np.errstate(invalid="ignore"):
        direction = np.where(present & (dist > 0), np.arctan2(ady, adx), np.nan)

    observed = wrap_angle(np.arctan2(ndy, ndx))
    previous = np.where(prev_ok, wrap_angle(np.arctan2(pdy, pdx)), np.nan)
    cm = wrap_angle(np.arctan2(ry, rx))

    sel = np.flatnonzero(keep)
    return DesignRows(
        focal_id, associate_ids,
        t=tk[sel], observed=observed[sel], previous=previous[sel],
        dt_next=dt_next[sel], dt_prev=dt_prev[sel], da=da[sel], iid=iid_sum[sel],
        cm=cm[sel], assoc_dir=wrap_angle(direction[sel]), assoc_dist=dist[sel],
        assoc_travel=travel[sel], assoc_gap=gap[sel],
    )
