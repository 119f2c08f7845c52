"""Conditional linear direction models and their design matrices.

The focal heading (as a unit vector) is modelled as a non-negative
combination of candidate directions, each switched on by a gate:

* group-only model: previous bearing, plus the circular mean direction of the
  group when the summed distance to associates exceeds ``alpha_iid`` and the
  directional agreement exceeds ``alpha_da``;
* group-plus-individuals model: additionally one term per associate, the unit
  vector toward it, active when that associate is farther than ``alpha_sd``.

Every observation contributes two equations (x and y components).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..errors import EmptyRows, InvalidConfig
from ..extraction import DesignRows
from .nnls import nnls_gram


class Variant(str, Enum):
    GROUP_ONLY = "eq1"
    GROUP_PLUS_INDIVIDUALS = "eq2"


@dataclass(frozen=True)
class ModelForm:
    variant: Variant
    associate_ids: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        ids = tuple(str(a) for a in self.associate_ids)
        object.__setattr__(self, "associate_ids", ids)
        if len(set(ids)) != len(ids):
            raise InvalidConfig("associate_ids must be unique")
        if self.variant is Variant.GROUP_PLUS_INDIVIDUALS and not ids:
            raise InvalidConfig("the group-plus-individuals model needs associate_ids")

    @classmethod
    def group_only(cls):
        return cls(Variant.GROUP_ONLY)

    @classmethod
    def group_plus_individuals(cls, associate_ids):
        return cls(Variant.GROUP_PLUS_INDIVIDUALS, tuple(associate_ids))

    @property
    def individual_terms(self) -> bool:
        return self.variant is Variant.GROUP_PLUS_INDIVIDUALS

    @property
    def n_gates(self) -> int:
        return 3 if self.individual_terms else 2

    @property
    def gate_names(self) -> tuple:
        return ("alpha_iid", "alpha_da", "alpha_sd")[: self.n_gates]

    @property
    def weight_names(self) -> tuple:
        names = ("beta_prev", "beta_cm")
        if self.individual_terms:
            names += tuple(f"beta_{a}" for a in self.associate_ids)
        return names

    @property
    def n_columns(self) -> int:
        return len(self.weight_names)

    def default_bounds(self):
        return [(0.0, 1000.0), (0.0, 1.0), (0.0, 10.0)][: self.n_gates]


@dataclass(frozen=True)
class GateParams:
    alpha_iid: float
    alpha_da: float
    alpha_sd: float | None = None

    @classmethod
    def from_vector(cls, v):
        v = [float(a) for a in v]
        return cls(v[0], v[1], v[2] if len(v) > 2 else None)

    def as_vector(self, form: ModelForm):
        v = [self.alpha_iid, self.alpha_da]
        if form.individual_terms:
            if self.alpha_sd is None:
                raise InvalidConfig("alpha_sd is required for the group-plus-individuals model")
            v.append(self.alpha_sd)
        return np.array(v)


@dataclass(frozen=True)
class Weights:
    beta_prev: float
    beta_cm: float
    beta_assoc: dict = field(default_factory=dict)

    @classmethod
    def from_vector(cls, x, form: ModelForm):
        x = [float(v) for v in x]
        assoc = dict(zip(form.associate_ids, x[2:])) if form.individual_terms else {}
        return cls(x[0], x[1], assoc)

    def as_vector(self, form: ModelForm):
        v = [self.beta_prev, self.beta_cm]
        if form.individual_terms:
            v += [self.beta_assoc.get(a, 0.0) for a in form.associate_ids]
        return np.array(v)


def form_for(rows: DesignRows, variant) -> ModelForm:
    """Model form using every associate present in ``rows``."""
    variant = Variant(variant)
    if variant is Variant.GROUP_ONLY:
        return ModelForm.group_only()
    return ModelForm.group_plus_individuals(rows.associate_ids)


def _unit(angle):
    ok = np.isfinite(angle)
    a = np.where(ok, angle, 0.0)
    return np.where(ok, np.cos(a), 0.0), np.where(ok, np.sin(a), 0.0)


class DesignSystem:
    """Gate-independent precomputation for one set of rows and a model form.

    Holds the candidate unit vectors of every column, so that the design
    matrix for any gate setting is a masked copy.
    """

    def __init__(self, rows: DesignRows, form: ModelForm, keep_undefined_prev: bool = True):
        if len(rows) == 0:
            raise EmptyRows("no design rows to fit")
        if not keep_undefined_prev:
            rows = rows.take(np.flatnonzero(np.isfinite(rows.previous)))
            if len(rows) == 0:
                raise EmptyRows("no design rows with a defined previous bearing")
        self.rows = rows
        self.form = form
        n = len(rows)
        k = form.n_columns
        # vectors[r, c, col]: component c (0=x, 1=y) of column col at row r
        vec = np.zeros((n, 2, k))
        vec[:, 0, 0], vec[:, 1, 0] = _unit(rows.previous)
        vec[:, 0, 1], vec[:, 1, 1] = _unit(rows.cm)
        self.cm_defined = np.isfinite(rows.cm)
        if form.individual_terms:
            col_of = {a: j for j, a in enumerate(rows.associate_ids)}
            missing = [a for a in form.associate_ids if a not in col_of]
            if missing:
                raise InvalidConfig(f"associates {missing} are not in the design rows")
            sel = [col_of[a] for a in form.associate_ids]
            dirs = rows.assoc_dir[:, sel]
            ux, uy = _unit(dirs)
            vec[:, 0, 2:], vec[:, 1, 2:] = ux, uy
            dist = rows.assoc_dist[:, sel]
            # absent associates or undefined directions never switch on
            self.assoc_dist = np.where(np.isfinite(dirs) & np.isfinite(dist), dist, -np.inf)
        else:
            self.assoc_dist = np.zeros((n, 0))
        self.vectors = vec
        bx, by = np.cos(rows.observed), np.sin(rows.observed)
        self.target = np.column_stack([bx, by])
        self.bb = float(np.sum(self.target * self.target))
        self._flat_target = self.target.reshape(-1)

    def __len__(self):
        return len(self.rows)

    def gates_vector(self, gates):
        if isinstance(gates, GateParams):
            return gates.as_vector(self.form)
        return np.asarray(gates, dtype=float)

    def cm_gate(self, gates) -> np.ndarray:
        g = self.gates_vector(gates)
        return (self.rows.iid > g[0]) & (self.rows.da > g[1]) & self.cm_defined

    def assoc_gate(self, gates) -> np.ndarray:
        g = self.gates_vector(gates)
        if not self.form.individual_terms:
            return np.zeros((len(self), 0), dtype=bool)
        return self.assoc_dist > g[2]

    def mask(self, gates) -> np.ndarray:
        n = len(self)
        m = np.empty((n, self.form.n_columns))
        m[:, 0] = 1.0
        m[:, 1] = self.cm_gate(gates)
        m[:, 2:] = self.assoc_gate(gates)
        return m

    def matrix(self, gates) -> np.ndarray:
        """Design matrix, equations interleaved as (x_0, y_0, x_1, y_1, ...)."""
        X = self.vectors * self.mask(gates)[:, None, :]
        return X.reshape(-1, self.form.n_columns)

    @property
    def rhs(self) -> np.ndarray:
        return self._flat_target

    def normal_equations(self, gates):
        A = self.matrix(gates)
        return A.T @ A, A.T @ self._flat_target

    def solve(self, gates):
        """NNLS weights and rss for the given gates (normal-equation route)."""
        G, h = self.normal_equations(gates)
        return nnls_gram(G, h, self.bb)

    def objective(self, gates) -> float:
        return self.solve(gates)[1]

    def predict(self, gates, weights) -> np.ndarray:
        """Predicted direction vectors, shape (n, 2)."""
        w = weights.as_vector(self.form) if isinstance(weights, Weights) else np.asarray(weights)
        return (self.vectors * self.mask(gates)[:, None, :]) @ w


def build_design_matrix(rows: DesignRows, form: ModelForm, gates: GateParams):
    """Stacked two-equations-per-row system ``(A, b)`` for fixed gates."""
    system = DesignSystem(rows, form)
    return system.matrix(gates), system.rhs.copy()


def objective(rows: DesignRows, form: ModelForm, gates: GateParams) -> float:
    """Residual sum of squares of the NNLS fit at the given gates."""
    return DesignSystem(rows, form).objective(gates)


@dataclass(frozen=True)
class ActivationRates:
    cm: float
    assoc: dict


def activation_rate(rows: DesignRows, gates: GateParams, form: ModelForm) -> ActivationRates:
    """Fraction of rows on which each gated term is switched on."""
    system = DesignSystem(rows, form)
    cm = float(np.mean(system.cm_gate(gates)))
    assoc = {}
    if form.individual_terms:
        on = system.assoc_gate(gates)
        assoc = {a: float(np.mean(on[:, j])) for j, a in enumerate(form.associate_ids)}
    return ActivationRates(cm, assoc)
