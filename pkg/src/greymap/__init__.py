"""Grey-number cognitive maps: arithmetic, inference engines and convergence checks."""

from greymap.grey_core import (
    GGN,
    IGN,
    GreyDomain,
    GGNVector,
    GGNMatrix,
    IntervalArray,
    ggn_from_intervals,
    metric_d,
    metric_d2,
)
from greymap.activation import ActivationKind, Kind
from greymap.engines import Behavior, BehaviorKind, Engine, Model, Trajectory, classify, run
from greymap.analysis import ConditionVerdict, ConvergenceReport, Verdict, full_report
from greymap.scenarios import ScenarioId, builtin, load_model, save_model

__version__ = "0.1.0"
