"""Panel semiparametric quantile regression neural network toolkit."""

from .errors import ConfigError, DataError, TrainingError
from .losses import TauGrid, huber, huber_deriv, pinball, smoothed_pinball, \
    smoothed_pinball_deriv
from .metrics import ForecastReport, mape, report, rrmse
from .model import (
    ModelKind,
    ModelParameters,
    PanelDesign,
    PenaltyConfig,
    ShrinkageSummary,
    average_check_loss,
    objective,
    objective_gradient,
    predict,
    predict_panel,
    shrink_report,
)
from .network import NetworkParameters, NetworkSpec, backward, forward, init_parameters
from .paneldata import (
    DEFAULT_SCHEMA,
    PanelDataset,
    PanelSchema,
    ScenarioSplit,
    StandardizationState,
    SyntheticConfig,
    SyntheticTruth,
    apply_standardization,
    destandardize_response,
    emit,
    generate_synthetic,
    impute_mean,
    ingest,
    materialize_split,
    scenario_split,
    standardize,
)
from .pipeline import (
    PreparedScenario,
    TrainedModel,
    beta_original_scale,
    default_tau_grid,
    evaluate_split,
    predict_matrix,
    prepare_scenario,
    train_model,
)
from .selection import BicInput, GridSearchResult, SearchGrid, bic1, bic2, grid_search
from .trainer import (
    AnnealSchedule,
    FitResult,
    TrainConfig,
    epsilon_sequence,
    fit,
    fit_per_tau,
)

__version__ = "0.1.0"
