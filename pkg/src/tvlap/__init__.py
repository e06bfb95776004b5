"""Online trend, derivative and extrema estimation with local Taylor-polynomial
state-space models and Kalman filtering."""

from .analysis import (
    ExtremaEvent,
    ExtremaMode,
    ExtremumKind,
    Tracker,
    TrackOutput,
    VarianceMonitor,
    classify_extremum,
    diagnose,
    forecast_extrema,
    monitor_update,
    track,
)
from .kalman import FilterState, ForecastPoint, forecast, init_state, riccati_converged, run, step, step_correlated
from .model import (
    ArmaSpec,
    AugmentedModel,
    GVariant,
    SpecialModel,
    StateSpaceModel,
    TvlapConfig,
    arma_to_state_space,
    augment,
    build_measurement,
    build_noise_driver,
    build_transition,
    make_special,
    make_tvlap,
)
from .noise import estimate_r, impulse_response, innovation_variance
from .verify import check_system, controllability_matrix, observability_matrix

__version__ = "0.1.0"
