from zo_sadom.network.graphs import Graph, GraphSequenceSpec, build_graph, \
    laplacian
from zo_sadom.network.gossip import GossipRound, gossip_from_laplacian, \
    gossip_apply, multi_gossip_apply, estimate_chi, check_gossip_round
from zo_sadom.objectives.logreg import Dataset, parse_libsvm, partition, \
    logreg_value_grad, calibrate_regularizer
from zo_sadom.objectives.problem import ProblemSpec, make_problem, \
    pooled_value, pooled_gradient, estimate_constants
from zo_sadom.objectives.reference import ReferenceSolution, \
    reference_minimizer
from zo_sadom.zeroth_order.sampling import sample_unit_sphere, \
    sample_unit_ball, smoothed_value
from zo_sadom.zeroth_order.estimators import OracleConfig, EstimatorStats, \
    estimate_gradient, measure_estimator
from zo_sadom.zeroth_order.bounds import variance_bound, bias_bound
from zo_sadom.sadom.hyperparameters import Hyperparameters, \
    derive_hyperparameters
from zo_sadom.sadom.step import SadomState, sadom_step
from zo_sadom.sadom.lyapunov import lyapunov
from zo_sadom.sadom.runner import StopConfig, MetricsLog, run
from zo_sadom.harness.budget import BudgetReport, budget_zo
from zo_sadom.harness.experiment import compare_topologies
from zo_sadom.utils.config import RunConfig, parse_config
