"""Movement data containers plus planar and circular geometry.

Angles are plain floats in radians, wrapped into (-pi, pi].  Planar points
are ``(x, y)`` pairs in projected meters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import DegenerateResultant, ValidationError, ZeroDisplacement

#: Below this step length (m) two points are treated as coincident.
MIN_DISPLACEMENT = 1e-9
#: Mean resultant length at or below which the circular mean is undefined.
DEGENERATE_RESULTANT = 1e-9


class Fix(NamedTuple):
    individual_id: str
    t: float
    x: float
    y: float


class UnitVector(NamedTuple):
    ux: float
    uy: float


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Time-ordered fixes of one individual, stored column-wise.

    Construction validates the invariants: finite values and strictly
    increasing time stamps.
    """

    individual_id: str
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        t = np.array(self.t, dtype=float)
        x = np.array(self.x, dtype=float)
        y = np.array(self.y, dtype=float)
        if not (t.ndim == x.ndim == y.ndim == 1) or not (len(t) == len(x) == len(y)):
            raise ValidationError("t, x and y must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValidationError(f"non-finite value in trajectory {self.individual_id!r}")
        if len(t) > 1 and np.any(np.diff(t) <= 0):
            raise ValidationError(
                f"time stamps of {self.individual_id!r} are not strictly increasing"
            )
        for name, arr in (("t", t), ("x", x), ("y", y)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_fixes(cls, fixes: Iterable[Fix]) -> "Trajectory":
        fixes = list(fixes)
        if not fixes:
            raise ValidationError("a trajectory needs at least one fix")
        ids = {f.individual_id for f in fixes}
        if len(ids) != 1:
            raise ValidationError(f"fixes belong to several individuals: {sorted(ids)}")
        return cls(
            fixes[0].individual_id,
            [f.t for f in fixes],
            [f.x for f in fixes],
            [f.y for f in fixes],
        )

    def __len__(self):
        return len(self.t)

    @property
    def fixes(self) -> list[Fix]:
        return [
            Fix(self.individual_id, float(t), float(x), float(y))
            for t, x, y in zip(self.t, self.x, self.y)
        ]

    @property
    def xy(self) -> np.ndarray:
        return np.column_stack([self.x, self.y])

    def subset(self, index) -> "Trajectory":
        return Trajectory(self.individual_id, self.t[index], self.x[index], self.y[index])

    def __eq__(self, other):
        if not isinstance(other, Trajectory):
            return NotImplemented
        return (
            self.individual_id == other.individual_id
            and np.array_equal(self.t, other.t)
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.y, other.y)
        )


@dataclass(frozen=True)
class GroupDataset:
    """Trajectories of a whole group keyed by individual id."""

    trajectories: Mapping[str, Trajectory]
    crs_note: str = "projected planar coordinates (m)"
    _ids: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        trajs = dict(self.trajectories)
        if len(trajs) < 2:
            raise ValidationError("a group dataset needs at least 2 individuals")
        for key, traj in trajs.items():
            if key != traj.individual_id:
                raise ValidationError(f"key {key!r} does not match trajectory id {traj.individual_id!r}")
        object.__setattr__(self, "trajectories", trajs)
        object.__setattr__(self, "_ids", tuple(sorted(trajs, key=id_sort_key)))

    @property
    def ids(self) -> tuple:
        """Individual ids in canonical order (numeric ids sort numerically)."""
        return self._ids

    def __getitem__(self, individual_id) -> Trajectory:
        return self.trajectories[individual_id]

    def __iter__(self):
        return iter(self._ids)

    def __len__(self):
        return len(self._ids)


def id_sort_key(individual_id):
    s = str(individual_id)
    return (0, int(s), s) if s.lstrip("-").isdigit() else (1, 0, s)


def wrap_angle(a):
    """Wrap angles into (-pi, pi]. Works on scalars and arrays."""
    a = np.asarray(a, dtype=float)
    inside = (a > -np.pi) & (a <= np.pi)
    wrapped = np.where(inside, a, np.pi - np.mod(np.pi - a, 2 * np.pi))
    return float(wrapped) if np.ndim(wrapped) == 0 else wrapped


def bearing(p0: Sequence[float], p1: Sequence[float]) -> float:
    """Direction of travel from ``p0`` to ``p1``.

    Raises
    ------
    ZeroDisplacement
        If the points are closer than ``MIN_DISPLACEMENT``.
    """
    dx = float(p1[0]) - float(p0[0])
    dy = float(p1[1]) - float(p0[1])
    if math.hypot(dx, dy) < MIN_DISPLACEMENT:
        raise ZeroDisplacement(f"no displacement between {tuple(p0)} and {tuple(p1)}")
    return wrap_angle(math.atan2(dy, dx))


def angle_to_unit(a: float) -> UnitVector:
    return UnitVector(math.cos(a), math.sin(a))


def unit_to_angle(v) -> float:
    ux, uy = v
    if abs(math.hypot(ux, uy) - 1.0) > 1e-9:
        raise ValidationError(f"({ux}, {uy}) is not a unit vector")
    return wrap_angle(math.atan2(uy, ux))


def angular_difference(a, b):
    """Signed smallest rotation taking ``b`` onto ``a``, in (-pi, pi]."""
    return wrap_angle(np.subtract(a, b))


def _resultant(angles) -> tuple[float, float, int]:
    angles = np.asarray(angles, dtype=float).ravel()
    if angles.size == 0:
        raise ValidationError("at least one angle is required")
    return float(np.sum(np.cos(angles))), float(np.sum(np.sin(angles))), angles.size


def circular_mean(angles) -> float:
    """Circular mean direction.

    Raises
    ------
    DegenerateResultant
        When the mean resultant length is at most ``DEGENERATE_RESULTANT``.
    """
    c, s, n = _resultant(angles)
    if math.hypot(c, s) / n <= DEGENERATE_RESULTANT:
        raise DegenerateResultant("directions cancel; circular mean undefined")
    return wrap_angle(math.atan2(s, c))


def directional_agreement(angles) -> float:
    """Mean resultant length of ``angles``: 1 for perfect alignment, 0 for none."""
    c, s, n = _resultant(angles)
    return min(1.0, math.hypot(c, s) / n)


def iid(focal, associates) -> float:
    """Summed Euclidean distance from the focal point to every associate."""
    pts = np.asarray(associates, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise ValidationError("at least one associate is required")
    d = pts - np.asarray(focal, dtype=float)
    return float(np.sum(np.sqrt(d[:, 0] ** 2 + d[:, 1] ** 2)))


def group_geometry(dx: np.ndarray, dy: np.ndarray, present: np.ndarray | None = None):
    """Vectorised egocentric group geometry.

    ``dx`` and ``dy`` have shape ``(n, m)``: offsets from each of ``n`` focal
    positions to ``m`` associates.  Associates are accumulated column by
    column, in order, with plain IEEE arithmetic so that the simulator's
    compiled kernel reproduces these numbers bit for bit.

    Returns
    -------
    dist : (n, m) distances, NaN where absent
    iid : (n,) summed distances
    da : (n,) mean resultant length of directions to associates
    rx, ry : (n,) unit resultant direction (NaN when degenerate or empty)
    n_dir : (n,) number of associates with a defined direction
    """
    dx = np.asarray(dx, dtype=float)
    dy = np.asarray(dy, dtype=float)
    if present is None:
        present = np.isfinite(dx) & np.isfinite(dy)
    n, m = dx.shape
    dist = np.sqrt(dx * dx + dy * dy)
    dist[~present] = np.nan
    iid_sum = np.zeros(n)
    sx = np.zeros(n)
    sy = np.zeros(n)
    n_dir = np.zeros(n, dtype=np.int64)
    with np.errstate(invalid="ignore", divide="ignore"):
        for j in range(m):
            ok = present[:, j]
            d = dist[:, j]
            iid_sum = np.where(ok, iid_sum + d, iid_sum)
            has_dir = ok & (d > 0.0)
            sx = np.where(has_dir, sx + dx[:, j] / d, sx)
            sy = np.where(has_dir, sy + dy[:, j] / d, sy)
            n_dir += has_dir
        norm = np.sqrt(sx * sx + sy * sy)
        da = np.where(n_dir > 0, norm / n_dir, 0.0)
        da = np.minimum(da, 1.0)
        defined = da > DEGENERATE_RESULTANT
        rx = np.where(defined, sx / norm, np.nan)
        ry = np.where(defined, sy / norm, np.nan)
    return dist, iid_sum, da, rx, ry, n_dir
