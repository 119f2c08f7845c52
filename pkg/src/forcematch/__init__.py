"""Force matching on travel directions for sparse group movement data."""

from .core import (
    Fix,
    GroupDataset,
    Trajectory,
    UnitVector,
    angle_to_unit,
    angular_difference,
    bearing,
    circular_mean,
    directional_agreement,
    iid,
    unit_to_angle,
    wrap_angle,
)
from .extraction import (
    AssociateState,
    DesignRow,
    DesignRows,
    ExtractionOptions,
    extract_design_rows,
    interpolate_direction,
    interpolate_position,
)
from .force_model import (
    BootstrapConfig,
    DEConfig,
    FitResult,
    GateParams,
    ModelForm,
    Variant,
    Weights,
    activation_rate,
    bootstrap_ci,
    build_design_matrix,
    cm_direction_correlation,
    differential_evolution,
    fit,
    form_for,
    nnls,
    objective,
    r_squared,
)
from .simulator import BehaviorLog, SimConfig, ground_truth_activation, simulate
from .sparsifier import RevisitDistribution, degrade, distribution_for_target_mean

__version__ = "0.1.0"
