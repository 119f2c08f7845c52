"""Hybrid fitting: evolutionary search over gates, NNLS over weights."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from ..core import wrap_angle
from ..errors import EmptyRows, InvalidBounds, ValidationError, ZeroVariance
from ..extraction import DesignRows
from .design import DesignSystem, GateParams, ModelForm, Variant, Weights
from .evolution import DEConfig, default_workers, differential_evolution

log = logging.getLogger(__name__)

#: Predicted vectors shorter than this carry no direction.
MIN_PREDICTION_NORM = 1e-9


@dataclass
class FitResult:
    model_form: ModelForm
    gates: GateParams
    weights: Weights
    rss: float
    angular_sse: float
    n_angular_excluded: int
    r_squared: float
    r_squared_raw: float
    n_rows: int
    activation_rate_cm: float
    activation_rate_assoc: dict
    ci: dict | None = None
    ci_failures: int = 0
    seed: int | None = None
    optimizer_trace: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def parameters(self) -> dict:
        """Flat name -> value map of every gate and weight."""
        out = dict(zip(self.model_form.gate_names, self.gates.as_vector(self.model_form)))
        out.update(zip(self.model_form.weight_names, self.weights.as_vector(self.model_form)))
        return {k: float(v) for k, v in out.items()}

    def to_dict(self) -> dict:
        d = asdict(self)
        d["model_form"] = {"variant": self.model_form.variant.value,
                           "associate_ids": list(self.model_form.associate_ids)}
        d["ci"] = None if self.ci is None else {k: list(v) for k, v in self.ci.items()}
        return d

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **{"indent": 2, **kwargs})

    @classmethod
    def from_dict(cls, d) -> "FitResult":
        d = dict(d)
        mf = d["model_form"]
        d["model_form"] = ModelForm(Variant(mf["variant"]), tuple(mf["associate_ids"]))
        d["gates"] = GateParams(**d["gates"])
        w = d["weights"]
        d["weights"] = Weights(w["beta_prev"], w["beta_cm"], dict(w.get("beta_assoc", {})))
        if d.get("ci") is not None:
            d["ci"] = {k: tuple(v) for k, v in d["ci"].items()}
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ValidationError(f"unknown FitResult fields: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, text) -> "FitResult":
        return cls.from_dict(json.loads(text))


def _check_bounds(form: ModelForm, bounds):
    bounds = form.default_bounds() if bounds is None else [tuple(map(float, b)) for b in bounds]
    if len(bounds) != form.n_gates:
        raise InvalidBounds(f"{form.variant.value} needs {form.n_gates} gate bounds, got {len(bounds)}")
    return bounds


def _r_squared_parts(system: DesignSystem, gates, weights):
    pred = system.predict(gates, weights)
    resid = system.target - pred
    rss = float(np.sum(resid * resid))
    centered = system.target - system.target.mean(axis=0)
    tss = float(np.sum(centered * centered))
    return rss, tss, pred


def r_squared(rows: DesignRows, form: ModelForm, gates: GateParams, weights: Weights, clamp=True) -> float:
    """One minus RSS over TSS on the stacked unit-vector components.

    TSS is taken about the mean of each component.  ``clamp=False`` returns
    the raw value, which can be negative for poor weights.
    """
    if len(rows) < 2:
        raise ValidationError("r_squared needs at least 2 rows")
    system = DesignSystem(rows, form)
    rss, tss, _ = _r_squared_parts(system, gates, weights)
    if tss <= 0:
        raise ZeroVariance("all observed directions are identical")
    value = 1.0 - rss / tss
    return min(1.0, max(0.0, value)) if clamp else value


def _summarise(system: DesignSystem, gates: GateParams, result_x, seed, trace) -> FitResult:
    form = system.form
    weights = Weights.from_vector(result_x, form)
    rss, tss, pred = _r_squared_parts(system, gates, weights)
    norm = np.hypot(pred[:, 0], pred[:, 1])
    ok = norm >= MIN_PREDICTION_NORM
    theta_pred = np.arctan2(pred[ok, 1], pred[ok, 0])
    ang = wrap_angle(system.rows.observed[ok] - theta_pred)
    r2_raw = 1.0 - rss / tss if tss > 0 else float("nan")
    cm_on = system.cm_gate(gates)
    assoc_on = system.assoc_gate(gates)
    return FitResult(
        model_form=form,
        gates=gates,
        weights=weights,
        rss=rss,
        angular_sse=float(np.sum(np.square(ang))),
        n_angular_excluded=int(np.sum(~ok)),
        r_squared=float(min(1.0, max(0.0, r2_raw))) if np.isfinite(r2_raw) else 0.0,
        r_squared_raw=float(r2_raw),
        n_rows=len(system),
        activation_rate_cm=float(np.mean(cm_on)),
        activation_rate_assoc={a: float(np.mean(assoc_on[:, j])) for j, a in enumerate(form.associate_ids)}
        if form.individual_terms else {},
        seed=seed,
        optimizer_trace=[float(v) for v in trace],
    )


def fit(rows: DesignRows, form: ModelForm, bounds=None, config: DEConfig | None = None,
        keep_undefined_prev: bool = True) -> FitResult:
    """Fit gates by differential evolution and weights by NNLS.

    Parameters
    ----------
    rows : DesignRows
    form : ModelForm
    bounds : sequence of (lower, upper), optional
        Gate search box; defaults to 0-1000 m, 0-1 and (for the
        individual-terms model) 0-10 m.
    config : DEConfig, optional
    keep_undefined_prev : bool
        Rows without a previous bearing contribute a zero column instead of
        being dropped.
    """
    config = config or DEConfig()
    bounds = _check_bounds(form, bounds)
    system = DesignSystem(rows, form, keep_undefined_prev=keep_undefined_prev)
    de = differential_evolution(system.objective, bounds, config)
    gates = GateParams.from_vector(de.x)
    x, _ = system.solve(gates)
    log.debug("fit %s: gates=%s rss=%.6g after %d generations", form.variant.value, gates, de.fun, de.n_gens)
    return _summarise(system, gates, x, config.seed, de.trace)


@dataclass(frozen=True)
class BootstrapConfig:
    replicates: int = 200
    seed: int = 0
    level: float = 0.95
    de: DEConfig = DEConfig(max_gens=60, patience=15)
    workers: int | None = 1


@dataclass
class BootstrapResult:
    intervals: dict
    samples: dict
    n_failed: int
    replicates: int


def _replicate_seed(seed, index):
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1)[0])


def bootstrap_ci(rows: DesignRows, form: ModelForm, bounds=None,
                 config: BootstrapConfig | None = None) -> BootstrapResult:
    """Nonparametric bootstrap percentile intervals for every gate and weight.

    Rows are resampled with replacement and refit.  Replicate ``i`` draws
    its rows and its optimiser seed from ``(config.seed, i)`` only, so the
    result does not depend on execution order.  Failed replicates are
    counted and skipped.
    """
    config = config or BootstrapConfig()
    if config.replicates < 50:
        raise ValidationError("at least 50 bootstrap replicates are required")
    if len(rows) == 0:
        raise EmptyRows("no design rows to resample")
    bounds = _check_bounds(form, bounds)
    n = len(rows)
    names = form.gate_names + form.weight_names

    def one(i):
        seed = _replicate_seed(config.seed, i)
        rng = np.random.default_rng(seed)
        sample = rows.take(rng.integers(0, n, size=n))
        try:
            res = fit(sample, form, bounds, replace(config.de, seed=seed, workers=1))
        except Exception as exc:  # noqa: BLE001 - counted and reported
            log.warning("bootstrap replicate %d failed: %s", i, exc)
            return None
        p = res.parameters()
        return [p[k] for k in names]

    workers = config.workers or default_workers()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            out = list(pool.map(one, range(config.replicates)))
    else:
        out = [one(i) for i in range(config.replicates)]
    good = np.array([o for o in out if o is not None]).reshape(-1, len(names))
    tail = 50.0 * (1.0 - config.level)
    intervals = {}
    if len(good):
        lo = np.percentile(good, tail, axis=0)
        hi = np.percentile(good, 100.0 - tail, axis=0)
        intervals = {k: (float(a), float(b)) for k, a, b in zip(names, lo, hi)}
    return BootstrapResult(
        intervals=intervals,
        samples={k: good[:, j].copy() for j, k in enumerate(names)},
        n_failed=sum(o is None for o in out),
        replicates=config.replicates,
    )


def fit_with_ci(rows, form, bounds=None, config=None, bootstrap: BootstrapConfig | None = None) -> FitResult:
    """:func:`fit` followed by :func:`bootstrap_ci`, stored on the result."""
    result = fit(rows, form, bounds, config)
    boot = bootstrap_ci(rows, form, bounds, bootstrap)
    result.ci = boot.intervals
    result.ci_failures = boot.n_failed
    return result
