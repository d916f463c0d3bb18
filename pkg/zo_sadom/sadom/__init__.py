from zo_sadom.sadom.hyperparameters import Hyperparameters, \
    derive_hyperparameters, contraction_factor, beta_schedule, \
    sadom_error_bound
from zo_sadom.sadom.step import SadomState, initial_state, sadom_step
from zo_sadom.sadom.lyapunov import lyapunov, saddle_point, theorem_criterion
from zo_sadom.sadom.runner import StopConfig, MetricsLog, run
