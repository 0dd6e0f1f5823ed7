"""Altitude-dependent aggregate interference: mean model, fitting, two-point transfer."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .model import (EnvironmentParams, LosTransition, ModelParams, PathLossPair,
                    activity_from_normalized, frequency_normalized_activity, los_probability,
                    mean_interference, mean_interference_quadrature, path_loss_exponent,
                    shape_function)
from .metrics import db_from_linear, linear_from_db, r_squared, rmse_db
from .profiles import AltitudeGrid, AltitudeProfile
from .field import (MonteCarloEstimate, ShadowingSpec, SimulationSpec, aggregate_interference,
                    sample_field, synthesize_profile)
from .estimation import FitOptions, FitResult, fit_profile, profiled_scale
from .transfer import TransferResult, TransferSpec, evaluate_transfer, two_point_calibrate
from .config import RunConfig, load_config
