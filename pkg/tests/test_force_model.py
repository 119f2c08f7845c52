import json
import math

import numpy as np
import pytest
from helpers import make_rows, scaled
from hypothesis import given, settings
from hypothesis import strategies as st

from forcematch import (
    BootstrapConfig,
    DEConfig,
    DesignRows,
    FitResult,
    GateParams,
    ModelForm,
    Weights,
    activation_rate,
    bootstrap_ci,
    build_design_matrix,
    cm_direction_correlation,
    fit,
    form_for,
    objective,
    r_squared,
)
from forcematch.errors import EmptyRows, InvalidBounds, InvalidConfig, TooFewRows, ValidationError, ZeroVariance
from forcematch.force_model.diagnostics import fisher_lee

FAST = DEConfig(max_gens=60, patience=15, seed=0, workers=1)


def one_row(previous=0.0, cm=math.pi / 2, observed=0.3, iid=100.0, da=0.9):
    return DesignRows("f", ["a"], t=[0.0], observed=[observed], previous=[previous], dt_next=[1.0],
                      dt_prev=[1.0], da=[da], iid=[iid], cm=[cm], assoc_dir=[[cm]], assoc_dist=[[iid]])


# -- design matrix -------------------------------------------------------------

def test_design_matrix_axis_vectors():
    A, b = build_design_matrix(one_row(), ModelForm.group_only(), GateParams(50, 0.5))
    np.testing.assert_allclose(A, [[1, 0], [0, 1]], atol=1e-16)
    np.testing.assert_allclose(b, [math.cos(0.3), math.sin(0.3)])


def test_design_matrix_closed_gate():
    A, _ = build_design_matrix(one_row(), ModelForm.group_only(), GateParams(100.0, 0.5))
    assert np.all(A[:, 1] == 0)  # strict inequality: IID == alpha_iid stays closed
    A, _ = build_design_matrix(one_row(), ModelForm.group_only(), GateParams(50.0, 0.9))
    assert np.all(A[:, 1] == 0)


def test_design_matrix_eq2_columns():
    rows = make_rows(n=5, m=13)
    form = form_for(rows, "eq2")
    A, b = build_design_matrix(rows, form, GateParams(0, 0, 0))
    assert A.shape == (10, 15) and b.shape == (10,)
    assert form.weight_names[2:] == tuple(f"beta_{j}" for j in range(1, 14))


def test_undefined_previous_contributes_zero_column():
    rows = one_row(previous=float("nan"))
    A, _ = build_design_matrix(rows, ModelForm.group_only(), GateParams(0, 0))
    assert np.all(A[:, 0] == 0)


def test_empty_rows():
    rows = make_rows(n=5).take([])
    with pytest.raises(EmptyRows):
        objective(rows, ModelForm.group_only(), GateParams(0, 0))


def test_model_form_validation():
    with pytest.raises(InvalidConfig):
        ModelForm.group_plus_individuals([])
    with pytest.raises(InvalidConfig):
        ModelForm.group_plus_individuals(["a", "a"])
    with pytest.raises(InvalidConfig):
        GateParams(1, 0.5).as_vector(ModelForm.group_plus_individuals(["a"]))


# -- objective -----------------------------------------------------------------

def test_objective_self_prediction_is_zero():
    rows = make_rows(n=50, beta_cm=0.0, noise=0.0)
    for gates in [GateParams(0, 0), GateParams(500, 0.9)]:
        assert objective(rows, ModelForm.group_only(), gates) == pytest.approx(0.0, abs=1e-20)


def test_objective_perpendicular_single_row():
    rows = one_row(previous=0.0, observed=math.pi / 2, iid=10.0)
    assert objective(rows, ModelForm.group_only(), GateParams(50, 0.5)) == pytest.approx(1.0, abs=1e-15)


def test_objective_closed_gates_equals_prev_only_fit():
    rows = make_rows(n=80, seed=2)
    closed = objective(rows, ModelForm.group_only(), GateParams(1e9, 0.5))
    # oracle: 1-column least squares on the previous-bearing vectors
    a = np.column_stack([np.cos(rows.previous), np.sin(rows.previous)]).ravel()
    b = np.column_stack([np.cos(rows.observed), np.sin(rows.observed)]).ravel()
    beta = max(0.0, a @ b / (a @ a))
    assert closed == pytest.approx(float(np.sum((b - beta * a) ** 2)), rel=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.floats(0, 600), st.floats(0, 1), st.floats(0, 40))
def test_objective_row_permutation_invariant(seed, a_iid, a_da, a_sd):
    rows = make_rows(n=60, seed=seed % 7)
    perm = np.random.default_rng(seed).permutation(len(rows))
    form = form_for(rows, "eq2")
    g = GateParams(a_iid, a_da, a_sd)
    assert objective(rows.take(perm), form, g) == pytest.approx(objective(rows, form, g), rel=1e-10, abs=1e-12)


def test_objective_rotation_invariant():
    rows = make_rows(n=200, seed=4)
    form = form_for(rows, "eq2")
    phi = 0.77
    rot = rows.take(np.arange(len(rows)))
    for name in ("observed", "previous", "cm"):
        setattr(rot, name, getattr(rows, name) + phi)
    rot.assoc_dir = rows.assoc_dir + phi
    for g in [GateParams(10, 0.2, 5), GateParams(60, 0.5, 20), GateParams(90, 0.8, 0)]:
        assert objective(rot, form, g) == pytest.approx(objective(rows, form, g), rel=1e-10)


# -- fit -----------------------------------------------------------------------

def test_fit_self_prediction():
    rows = make_rows(n=100, beta_cm=0.0, noise=0.0)
    res = fit(rows, ModelForm.group_only(), config=FAST)
    assert res.weights.beta_prev == pytest.approx(1.0, abs=1e-9)
    assert res.rss == pytest.approx(0.0, abs=1e-12)
    assert res.r_squared == pytest.approx(1.0, abs=1e-12)
    assert res.n_angular_excluded == 0 and res.angular_sse == pytest.approx(0.0, abs=1e-12)


def test_fit_recovers_generating_model():
    rows = make_rows(n=600, seed=1, noise=0.02)
    # bounds follow the data: IID of 4 associates within 40 m never exceeds 160
    res = fit(rows, ModelForm.group_only(), [(0, 200), (0, 1)], DEConfig(seed=0, workers=1))
    # noise lets a neighbouring plateau beat the generating gates by a little
    assert abs(res.gates.alpha_iid - 60.0) < 2.0
    assert abs(res.gates.alpha_da - 0.5) < 0.05
    assert res.weights.beta_cm / res.weights.beta_prev == pytest.approx(1.5, rel=0.05)
    assert res.rss <= objective(rows, ModelForm.group_only(), GateParams(60.0, 0.5)) + 1e-12


def test_fit_trace_monotone_and_result_invariants():
    rows = make_rows(n=150, seed=3)
    res = fit(rows, form_for(rows, "eq2"), config=FAST)
    tr = res.optimizer_trace
    assert all(b <= a for a, b in zip(tr, tr[1:]))
    assert tr[-1] == pytest.approx(res.rss, rel=1e-9, abs=1e-12)
    assert 0 <= res.r_squared <= 1 and res.rss >= 0
    assert 0 <= res.activation_rate_cm <= 1
    assert all(0 <= v <= 1 for v in res.activation_rate_assoc.values())
    assert all(v >= 0 for v in res.weights.as_vector(res.model_form))


def test_fit_bounds_dimension():
    rows = make_rows(n=20)
    with pytest.raises(InvalidBounds):
        fit(rows, ModelForm.group_only(), bounds=[(0, 1)], config=FAST)


def test_fit_seed_reproducible():
    rows = make_rows(n=120, seed=8)
    form = form_for(rows, "eq2")
    a, b = fit(rows, form, config=FAST), fit(rows, form, config=FAST)
    assert a.to_json() == b.to_json()


def test_fit_distance_scaling():
    rows = make_rows(n=200, seed=5, beta_assoc=[0.5, 0, 0, 0], alpha_sd=20.0)
    form = form_for(rows, "eq2")
    bounds = [(0, 200), (0, 1), (0, 40)]
    base = fit(rows, form, bounds, FAST)
    # a power of two scales every DE coordinate exactly, so the search path is identical
    c = 2.0
    big = fit(scaled(rows, c), form, [(lo * c, hi * c) if k != 1 else (lo, hi)
                                      for k, (lo, hi) in enumerate(bounds)], FAST)
    assert big.gates.alpha_iid == c * base.gates.alpha_iid
    assert big.gates.alpha_sd == c * base.gates.alpha_sd
    assert big.gates.alpha_da == base.gates.alpha_da
    np.testing.assert_allclose(big.weights.as_vector(form), base.weights.as_vector(form), rtol=1e-12)
    # any factor: the scaled optimum has the same objective in the scaled problem
    c = 3.7
    g = GateParams(base.gates.alpha_iid * c, base.gates.alpha_da, base.gates.alpha_sd * c)
    assert objective(scaled(rows, c), form, g) == pytest.approx(base.rss, rel=1e-10)


def test_fit_result_json_roundtrip():
    rows = make_rows(n=80, seed=6)
    res = fit(rows, form_for(rows, "eq2"), config=FAST)
    res.ci = {"alpha_iid": (1.0, 2.0)}
    res.metadata = {"label": "x"}
    back = FitResult.from_json(res.to_json())
    assert back == res
    d = json.loads(res.to_json())
    d["bogus"] = 1
    with pytest.raises(ValidationError):
        FitResult.from_dict(d)


# -- R^2 -----------------------------------------------------------------------

def test_r_squared_examples():
    rows = make_rows(n=50, beta_cm=0.0, noise=0.0)
    form = ModelForm.group_only()
    assert r_squared(rows, form, GateParams(0, 0), Weights(1.0, 0.0)) == pytest.approx(1.0)
    assert r_squared(rows, form, GateParams(0, 0), Weights(0.0, 0.0)) == 0.0
    assert r_squared(rows, form, GateParams(0, 0), Weights(0.0, 0.0), clamp=False) <= 0.0


def test_r_squared_oracle():
    rows = make_rows(n=70, seed=9)
    form = ModelForm.group_only()
    g, w = GateParams(50, 0.4), Weights(0.8, 1.1)
    A, b = build_design_matrix(rows, form, g)
    pred = (A @ w.as_vector(form)).reshape(-1, 2)
    obs = b.reshape(-1, 2)
    expected = 1 - np.sum((obs - pred) ** 2) / np.sum((obs - obs.mean(axis=0)) ** 2)
    assert r_squared(rows, form, g, w, clamp=False) == pytest.approx(expected, rel=1e-12)


def test_r_squared_errors():
    rows = make_rows(n=10)
    rows.observed = np.zeros(10)
    with pytest.raises(ZeroVariance):
        r_squared(rows, ModelForm.group_only(), GateParams(0, 0), Weights(1, 1))
    with pytest.raises(ValidationError):
        r_squared(rows.take([0]), ModelForm.group_only(), GateParams(0, 0), Weights(1, 1))


# -- activation ----------------------------------------------------------------

def test_activation_rate_examples():
    rows = make_rows(n=100, seed=2)
    form = form_for(rows, "eq2")
    assert activation_rate(rows, GateParams(0, 0, 0), form).cm == pytest.approx(np.mean(np.isfinite(rows.cm)))
    assert activation_rate(rows, GateParams(0, 1, 0), form).cm == 0.0
    rates = activation_rate(rows, GateParams(0, 0, 20), form)
    assert rates.assoc["1"] == pytest.approx(np.mean(rows.assoc_dist[:, 0] > 20))


# -- bootstrap -----------------------------------------------------------------

def test_bootstrap_self_predicting_rows():
    rows = make_rows(n=60, beta_cm=0.0, noise=0.0)
    boot = bootstrap_ci(rows, ModelForm.group_only(), config=BootstrapConfig(
        replicates=50, de=DEConfig(max_gens=10, patience=5)))
    lo, hi = boot.intervals["beta_prev"]
    assert hi - lo < 0.01 and lo <= 1.0 <= hi
    assert boot.n_failed == 0 and len(boot.samples["beta_prev"]) == 50


def test_bootstrap_contains_point_estimate_and_is_order_independent():
    rows = make_rows(n=200, seed=11, noise=0.1)
    form = ModelForm.group_only()
    bounds = [(0, 200), (0, 1)]
    res = fit(rows, form, bounds, FAST)
    cfg = BootstrapConfig(replicates=60, seed=3, de=DEConfig(max_gens=30, patience=10))
    serial = bootstrap_ci(rows, form, bounds, cfg)
    for k in ("beta_prev", "beta_cm"):
        lo, hi = serial.intervals[k]
        assert lo <= res.parameters()[k] <= hi
    threaded = bootstrap_ci(rows, form, bounds, BootstrapConfig(replicates=60, seed=3, workers=3,
                                                               de=DEConfig(max_gens=30, patience=10)))
    assert threaded.intervals == serial.intervals


def test_bootstrap_requires_50_replicates():
    with pytest.raises(ValidationError):
        bootstrap_ci(make_rows(n=20), ModelForm.group_only(), config=BootstrapConfig(replicates=49))


# -- circular correlation ------------------------------------------------------

def fisher_lee_bruteforce(a, b):
    """Pairwise definition: sum over i<j of sin(a_i-a_j) sin(b_i-b_j), normalised."""
    a, b = np.asarray(a), np.asarray(b)
    sa = np.sin(a[:, None] - a[None, :])
    sb = np.sin(b[:, None] - b[None, :])
    iu = np.triu_indices(len(a), 1)
    num = np.sum(sa[iu] * sb[iu])
    return num / math.sqrt(np.sum(sa[iu] ** 2) * np.sum(sb[iu] ** 2))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(-4, 4), st.floats(-4, 4)), min_size=3, max_size=40))
def test_fisher_lee_matches_pairwise_oracle(pairs):
    a, b = np.array(pairs).T
    ref_den = np.sum(np.sin(a[:, None] - a[None, :]) ** 2) * np.sum(np.sin(b[:, None] - b[None, :]) ** 2)
    if ref_den < 1e-6:
        return
    assert fisher_lee(a, b) == pytest.approx(fisher_lee_bruteforce(a, b), abs=1e-9)


def test_cm_direction_correlation_examples():
    rows = make_rows(n=200, m=2, seed=1)
    rows.assoc_dir[:, 0] = rows.cm
    assert cm_direction_correlation(rows, "1") == pytest.approx(1.0, abs=1e-12)
    rows.assoc_dir[:, 0] = rows.cm + 1.1
    assert cm_direction_correlation(rows, "1") == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(TooFewRows):
        cm_direction_correlation(rows.take([0, 1]), "1")


def test_cm_direction_correlation_null():
    rng = np.random.default_rng(0)
    rows = make_rows(n=1000, m=2, seed=2)
    rows.assoc_dir[:, 0] = rng.uniform(-np.pi, np.pi, 1000)
    assert abs(cm_direction_correlation(rows, "1")) < 0.1
