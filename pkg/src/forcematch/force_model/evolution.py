"""Differential evolution (DE/rand/1/bin) for box-bounded minimisation."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidBounds, InvalidConfig


@dataclass(frozen=True)
class DEConfig:
    pop_size: int | None = None  # default 10 * dimension
    F: float = 0.8
    CR: float = 0.9
    max_gens: int = 300
    tol: float = 1e-10
    patience: int = 30
    seed: int | None = 0
    workers: int | None = None  # default FORCEMATCH_THREADS or cpu count

    def validate(self, dim):
        pop = self.pop_size if self.pop_size is not None else 10 * dim
        if pop < 4:
            raise InvalidConfig("pop_size must be at least 4")
        if not 0 < self.F <= 2:
            raise InvalidConfig("F must lie in (0, 2]")
        if not 0 <= self.CR <= 1:
            raise InvalidConfig("CR must lie in [0, 1]")
        if self.max_gens < 1 or self.patience < 1 or self.tol < 0:
            raise InvalidConfig("max_gens and patience must be >= 1, tol >= 0")
        return pop


@dataclass
class DEResult:
    x: np.ndarray
    fun: float
    trace: list = field(default_factory=list)  # best objective per generation
    n_gens: int = 0
    n_evals: int = 0
    population: np.ndarray | None = None
    population_fun: np.ndarray | None = None


def default_workers():
    env = os.environ.get("FORCEMATCH_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InvalidConfig(f"FORCEMATCH_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _check_bounds(bounds):
    b = np.asarray(bounds, dtype=float)
    if b.ndim != 2 or b.shape[1] != 2 or len(b) == 0:
        raise InvalidBounds("bounds must be a sequence of (lower, upper) pairs")
    if not np.all(np.isfinite(b)):
        raise InvalidBounds("bounds must be finite")
    if np.any(b[:, 0] >= b[:, 1]):
        raise InvalidBounds("each lower bound must be below its upper bound")
    return b[:, 0].copy(), b[:, 1].copy()


def differential_evolution(f, bounds, config: DEConfig | None = None) -> DEResult:
    """Minimise ``f`` over a box with classic DE/rand/1/bin.

    Initial members are uniform in the box.  Each generation builds, for
    every member, a mutant ``a + F (b - c)`` from three distinct other
    members, crosses it binomially with rate ``CR`` (one coordinate always
    taken from the mutant), clamps it into the box and keeps it if it is no
    worse than the parent.  Ties go to the trial, which lets the population
    drift across flat regions.

    Stops after ``max_gens`` generations, or once the best value has
    improved by less than ``tol`` over the last ``patience`` generations.
    Results depend only on ``seed``.
    """
    config = config or DEConfig()
    lo, hi = _check_bounds(bounds)
    dim = len(lo)
    pop_size = config.validate(dim)
    rng = np.random.default_rng(config.seed)
    workers = config.workers or default_workers()

    pool = ThreadPoolExecutor(workers) if workers > 1 else None

    def evaluate(members):
        if pool is None:
            return np.array([float(f(m)) for m in members])
        return np.array(list(pool.map(lambda m: float(f(m)), members)))

    try:
        pop = lo + rng.random((pop_size, dim)) * (hi - lo)
        fit = evaluate(pop)
        n_evals = pop_size
        trace = [float(fit.min())]
        gens = 0
        idx = np.arange(pop_size)
        for gens in range(1, config.max_gens + 1):
            trials = np.empty_like(pop)
            for i in range(pop_size):
                a, b, c = rng.choice(idx[idx != i], 3, replace=False)
                mutant = pop[a] + config.F * (pop[b] - pop[c])
                cross = rng.random(dim) < config.CR
                cross[rng.integers(dim)] = True
                trials[i] = np.where(cross, mutant, pop[i])
            np.clip(trials, lo, hi, out=trials)
            trial_fit = evaluate(trials)
            n_evals += pop_size
            better = trial_fit <= fit
            pop[better] = trials[better]
            fit[better] = trial_fit[better]
            trace.append(float(fit.min()))
            if gens >= config.patience and trace[-1 - config.patience] - trace[-1] < config.tol:
                break
    finally:
        if pool is not None:
            pool.shutdown()

    best = int(np.argmin(fit))
    return DEResult(pop[best].copy(), float(fit[best]), trace, gens, n_evals, pop, fit)
