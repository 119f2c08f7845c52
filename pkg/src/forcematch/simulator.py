"""Agent-based ground truth for recovery experiments.

Agents forage on an open landscape of food patches.  At every step each agent
evaluates its isolation from the rest of the group; when the summed distance
to the others exceeds ``iso_iid`` and the directions to them agree more than
``iso_da``, it heads for the circular mean direction of the group.  Otherwise
it walks toward the nearest visible patch, or keeps its heading with a little
noise.  The per-step mode of every agent is logged so that fitted gates can be
checked against what actually happened.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

import numba
import numpy as np

from .core import GroupDataset, Trajectory, group_geometry
from .errors import InvalidConfig

FORAGING = 0
COHESION = 1


@dataclass(frozen=True)
class SimConfig:
    n_agents: int = 14
    duration: float = 172800.0
    step: float = 1.0
    iso_iid: float = 350.0
    iso_da: float = 0.8
    speed: float = 1.0
    perception_radius: float = 50.0
    arena_width: float = 2000.0
    arena_height: float = 2000.0
    patch_count: int = 30
    patch_radius: float = 5.0
    patch_lifetime: float = 3600.0
    heading_noise: float = 0.1
    start_radius: float = 30.0
    seed: int = 0

    def validate(self):
        if self.n_agents < 2:
            raise InvalidConfig("n_agents must be at least 2")
        for name in ("duration", "step", "speed", "arena_width", "arena_height",
                     "patch_radius", "patch_lifetime", "perception_radius"):
            if not getattr(self, name) > 0:
                raise InvalidConfig(f"{name} must be positive")
        if self.duration < 2 * self.step:
            raise InvalidConfig("duration must cover at least two steps")
        if self.patch_count < 0 or self.heading_noise < 0 or self.start_radius < 0:
            raise InvalidConfig("patch_count, heading_noise and start_radius must be >= 0")
        if not 0.0 <= self.iso_da <= 1.0:
            raise InvalidConfig("iso_da must lie in [0, 1]")
        if not self.iso_iid >= 0:
            raise InvalidConfig("iso_iid must be >= 0")
        return self

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.step))

    def replace(self, **changes) -> "SimConfig":
        unknown = set(changes) - {f.name for f in fields(self)}
        if unknown:
            raise InvalidConfig(f"unknown SimConfig fields: {sorted(unknown)}")
        return SimConfig(**{**asdict(self), **changes})


@dataclass(frozen=True, eq=False)
class BehaviorLog:
    """Mode of every agent at every recorded step (``True`` = cohesion)."""

    ids: tuple
    t: np.ndarray
    cohesion: np.ndarray  # (n_steps, n_agents) bool

    def __len__(self):
        return self.cohesion.size

    def modes(self, agent) -> np.ndarray:
        return self.cohesion[:, self.ids.index(str(agent))]

    def __eq__(self, other):
        return (isinstance(other, BehaviorLog) and self.ids == other.ids
                and np.array_equal(self.t, other.t)
                and np.array_equal(self.cohesion, other.cohesion))


@numba.njit(cache=True)
def _run(n_steps, n, dt, iso_iid, iso_da, speed, perception, width, height,
         n_patch, patch_radius, lifetime, noise, start_radius, seed):
    np.random.seed(seed)
    pos = np.empty((n_steps, n, 2))
    modes = np.zeros((n_steps, n), dtype=np.bool_)
    px = np.empty(n)
    py = np.empty(n)
    heading = np.empty(n)
    cx, cy = width / 2.0, height / 2.0
    for i in range(n):
        r = start_radius * math.sqrt(np.random.uniform(0.0, 1.0))
        a = np.random.uniform(-math.pi, math.pi)
        px[i] = cx + r * math.cos(a)
        py[i] = cy + r * math.sin(a)
        heading[i] = np.random.uniform(-math.pi, math.pi)
    patch_x = np.empty(n_patch)
    patch_y = np.empty(n_patch)
    patch_age = np.empty(n_patch)
    for p in range(n_patch):
        patch_x[p] = np.random.uniform(0.0, width)
        patch_y[p] = np.random.uniform(0.0, height)
        patch_age[p] = np.random.uniform(0.0, lifetime)
    ux = np.empty(n)
    uy = np.empty(n)
    for k in range(n_steps):
        for i in range(n):
            pos[k, i, 0] = px[i]
            pos[k, i, 1] = py[i]
        for i in range(n):
            # same accumulation order as core.group_geometry
            total = 0.0
            sx = 0.0
            sy = 0.0
            n_dir = 0
            for j in range(n):
                if j == i:
                    continue
                dx = px[j] - px[i]
                dy = py[j] - py[i]
                d = math.sqrt(dx * dx + dy * dy)
                total = total + d
                if d > 0.0:
                    sx = sx + dx / d
                    sy = sy + dy / d
                    n_dir += 1
            norm = math.sqrt(sx * sx + sy * sy)
            da = norm / n_dir if n_dir > 0 else 0.0
            da = min(da, 1.0)
            if total > iso_iid and da > iso_da and da > 1e-9:
                modes[k, i] = True
                ux[i] = sx / norm
                uy[i] = sy / norm
                heading[i] = math.atan2(uy[i], ux[i])
                continue
            best = -1
            best_d = perception
            for p in range(n_patch):
                dx = patch_x[p] - px[i]
                dy = patch_y[p] - py[i]
                d = math.sqrt(dx * dx + dy * dy)
                if d <= best_d and d > 0.0:
                    best = p
                    best_d = d
            if best >= 0:
                heading[i] = math.atan2(patch_y[best] - py[i], patch_x[best] - px[i])
            elif noise > 0.0:
                h = heading[i] + noise * np.random.normal()
                heading[i] = math.atan2(math.sin(h), math.cos(h))
            ux[i] = math.cos(heading[i])
            uy[i] = math.sin(heading[i])
        for i in range(n):
            px[i] = px[i] + speed * dt * ux[i]
            py[i] = py[i] + speed * dt * uy[i]
        for p in range(n_patch):
            patch_age[p] += dt
            eaten = False
            for i in range(n):
                dx = patch_x[p] - px[i]
                dy = patch_y[p] - py[i]
                if dx * dx + dy * dy <= patch_radius * patch_radius:
                    eaten = True
                    break
            if eaten or patch_age[p] >= lifetime:
                patch_x[p] = np.random.uniform(0.0, width)
                patch_y[p] = np.random.uniform(0.0, height)
                patch_age[p] = 0.0
    return pos, modes


def simulate(config: SimConfig | None = None):
    """Run the agent model.

    Returns
    -------
    data : GroupDataset
        Every agent at every step, ids ``"0" .. str(n_agents - 1)``.
    log : BehaviorLog
        Mode chosen by each agent at each recorded step.
    """
    config = (config or SimConfig()).validate()
    n_steps = config.n_steps
    pos, modes = _run(
        n_steps, config.n_agents, float(config.step), float(config.iso_iid),
        float(config.iso_da), float(config.speed), float(config.perception_radius),
        float(config.arena_width), float(config.arena_height), int(config.patch_count),
        float(config.patch_radius), float(config.patch_lifetime),
        float(config.heading_noise), float(config.start_radius), int(config.seed),
    )
    t = np.arange(n_steps) * float(config.step)
    ids = tuple(str(i) for i in range(config.n_agents))
    data = GroupDataset(
        {aid: Trajectory(aid, t, pos[:, i, 0], pos[:, i, 1]) for i, aid in enumerate(ids)},
        crs_note="simulated arena (m)",
    )
    t.setflags(write=False)
    return data, BehaviorLog(ids, t, modes)


def ground_truth_activation(log: BehaviorLog, agent) -> float:
    """Fraction of logged steps the agent spent in cohesion mode."""
    modes = log.modes(agent)
    return float(np.mean(modes)) if modes.size else 0.0


def isolation_modes(data: GroupDataset, iso_iid: float, iso_da: float) -> np.ndarray:
    """Apply the isolation predicate to a dense dataset.

    All trajectories must share one time grid.  Returns an
    ``(n_steps, n_agents)`` boolean array in ``data.ids`` order.
    """
    ids = data.ids
    t = data[ids[0]].t
    if any(not np.array_equal(data[a].t, t) for a in ids):
        raise InvalidConfig("isolation_modes needs trajectories on a common time grid")
    x = np.column_stack([data[a].x for a in ids])
    y = np.column_stack([data[a].y for a in ids])
    out = np.zeros(x.shape, dtype=bool)
    for i in range(len(ids)):
        others = [j for j in range(len(ids)) if j != i]
        _, total, da, _, _, _ = group_geometry(x[:, others] - x[:, [i]], y[:, others] - y[:, [i]])
        out[:, i] = (total > iso_iid) & (da > iso_da) & (da > 1e-9)
    return out
