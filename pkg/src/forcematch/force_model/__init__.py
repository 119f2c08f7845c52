"""Conditional direction models and the hybrid DE + NNLS fitting engine."""

from .design import (
    ActivationRates,
    DesignSystem,
    GateParams,
    ModelForm,
    Variant,
    Weights,
    activation_rate,
    build_design_matrix,
    form_for,
    objective,
)
from .diagnostics import cm_direction_correlation, fisher_lee
from .evolution import DEConfig, DEResult, differential_evolution
from .fitting import (
    BootstrapConfig,
    BootstrapResult,
    FitResult,
    bootstrap_ci,
    fit,
    fit_with_ci,
    r_squared,
)
from .nnls import nnls, nnls_gram

__all__ = [
    "ActivationRates", "BootstrapConfig", "BootstrapResult", "DEConfig", "DEResult",
    "DesignSystem", "FitResult", "GateParams", "ModelForm", "Variant", "Weights",
    "activation_rate", "bootstrap_ci", "build_design_matrix", "cm_direction_correlation",
    "differential_evolution", "fisher_lee", "fit", "fit_with_ci", "form_for", "nnls",
    "nnls_gram", "objective", "r_squared",
]
