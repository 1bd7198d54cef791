"""Trust-aided referral client selection for federated learning over IoT networks.

RCs (registered clients) either train themselves or refer a trusted UnRC
(unregistered client). Each round a selector picks the joint action and the
local accuracy theta by minimising a drift-plus-penalty objective.
"""

from .actions import ActionPolicy, RoundContext
from .baselines import BaselineKind, Picker, ThetaMode, baseline_select
from .central import Selection, centralized_select, enumerate_joint_actions, feasible_actions_per_rc
from .config import METHODS, ConfigError, SimConfig, load_config
from .lyap import LyapConfig, VirtualQueues, constraint_residuals, drift_penalty, update_queues
from .match import deferred_acceptance, distributed_select, is_stable
from .net import NetworkState, derive_neighbor_sets, init_topology
from .sghs import ObjectiveCoeffs, SghsParams, f_objective, grid_minimize, sghs_minimize
from .sim import RoundMetrics, run_simulation, write_outputs

__all__ = [
    "ActionPolicy", "RoundContext", "BaselineKind", "Picker", "ThetaMode", "baseline_select",
    "Selection", "centralized_select", "enumerate_joint_actions", "feasible_actions_per_rc",
    "METHODS", "ConfigError", "SimConfig", "load_config", "LyapConfig", "VirtualQueues",
    "constraint_residuals", "drift_penalty", "update_queues", "deferred_acceptance",
    "distributed_select", "is_stable", "NetworkState", "derive_neighbor_sets", "init_topology",
    "ObjectiveCoeffs", "SghsParams", "f_objective", "grid_minimize", "sghs_minimize",
    "RoundMetrics", "run_simulation", "write_outputs",
]
