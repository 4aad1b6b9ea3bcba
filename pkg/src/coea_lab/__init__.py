"""Simulation lab for binary test-based adversarial optimization.

Implements the (1,lambda) comma-selection EA on concatenated bitstrings and
the (1,lambda) coevolutionary algorithm with alternating updates on diagonal
payoff games, instruments the structural run quantities (diagonal crossings,
c-tube occupancy, successful cycles, drift), and ships exact/Monte-Carlo
oracles for the governing probability bounds.
"""

from ._kernel import backend as kernel_backend
from .bitstrings import Bitstring, onecount
from .errors import ConfigurationError, EmptyEstimateError, UnsupportedGameError
from .games import (
    DIAGONAL,
    GENERALIZED_BOUNDARY,
    GameSpec,
    Optimum,
    is_eps_approx,
    optimum,
    payoff,
)
from .mutation import MutationParams, jump, mutate
from .rng import RngHandle, stable_stream_id
from .runner import (
    COEA,
    EA,
    RunConfig,
    RunOutcome,
    RunTelemetry,
    default_restart_period,
    run,
)
from .steps import PairState, coea_step, ea_step
from .telemetry import (
    CrossingStats,
    GenerationRecord,
    TubeSpec,
    detect_crossing,
    detect_successful_cycle,
    drift_estimate,
    tube_membership,
)

__version__ = "0.1.0"

__all__ = [
    "Bitstring", "onecount",
    "MutationParams", "mutate", "jump",
    "RngHandle", "stable_stream_id",
    "GameSpec", "Optimum", "payoff", "is_eps_approx", "optimum",
    "DIAGONAL", "GENERALIZED_BOUNDARY",
    "EA", "COEA", "RunConfig", "RunOutcome", "RunTelemetry",
    "default_restart_period", "run",
    "PairState", "coea_step", "ea_step",
    "GenerationRecord", "TubeSpec", "CrossingStats",
    "detect_crossing", "detect_successful_cycle", "drift_estimate",
    "tube_membership",
    "ConfigurationError", "UnsupportedGameError", "EmptyEstimateError",
    "kernel_backend",
    "__version__",
]
