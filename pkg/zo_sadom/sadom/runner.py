from dataclasses import dataclass, field
from multiprocessing import cpu_count
from multiprocessing.pool import ThreadPool
import time
import numpy as np
import pandas as pd

from zo_sadom.network.graphs import GraphSequenceSpec
from zo_sadom.network.gossip import gossip_round_for
from zo_sadom.objectives.problem import ProblemSpec, pooled_value
from zo_sadom.objectives.reference import ReferenceSolution, \
    reference_minimizer
from zo_sadom.sadom.hyperparameters import Hyperparameters
from zo_sadom.sadom.lyapunov import lyapunov, theorem_criterion
from zo_sadom.sadom.step import SadomState, initial_state, sadom_step
from zo_sadom.zeroth_order.estimators import OracleConfig, estimate_gradients
from zo_sadom.utils.stacked import block_mean, consensus_error

COLUMNS = [
    "iter", "comm", "oracle", "seconds", "dist_sq", "gap", "criterion",
    "consensus", "psi_x", "psi_yz"
]


@dataclass(frozen=True)
class StopConfig:
    """
    Stopping rule of a run.

    Attributes:
        max_iters: The iteration budget.
        epsilon: Stop once the criterion is at most epsilon. None disables
            the check.
    """
    max_iters: int = 1000
    epsilon: float = None


@dataclass(eq=False)
class MetricsLog:
    """
    The snapshots of a run.

    Attributes:
        rows: One dict per snapshot with the keys of COLUMNS.
        converged: True if the criterion reached epsilon.
        comments: Free text lines written above the CSV header.
        final_state: The last iterates.
    """
    rows: list = field(default_factory=list)
    converged: bool = False
    comments: list = field(default_factory=list)
    final_state: SadomState = None

    def append(self, row: dict):
        if self.rows:
            last = self.rows[-1]
            assert row["comm"] >= last["comm"] and \
                row["oracle"] >= last["oracle"], \
                f"Counters must not decrease: {last} -> {row}"
        self.rows.append(row)

    def to_frame(self):
        """ The snapshots as a pandas DataFrame with columns COLUMNS. """
        return pd.DataFrame(self.rows, columns=COLUMNS)

    def __len__(self):
        return len(self.rows)


def snapshot(
        state: SadomState,
        hp: Hyperparameters,
        spec: ProblemSpec,
        ref: ReferenceSolution,
        comm: int,
        oracle: int,
        seconds: float,
):
    """
    Computes one metrics row.

    Returns:
        A dict with the keys of COLUMNS.
    """
    x_bar = block_mean(state.x)
    potentials = lyapunov(state, hp, ref, spec)
    return {
        "iter": state.k,
        "comm": comm,
        "oracle": oracle,
        "seconds": seconds,
        "dist_sq": float(np.sum(np.square(x_bar - ref.x_star))),
        "gap": pooled_value(spec, x_bar) - ref.f_star,
        "criterion": theorem_criterion(spec, ref, state.x, state.x_f),
        "consensus": consensus_error(state.x),
        "psi_x": potentials.psi_x,
        "psi_yz": potentials.psi_yz,
    }


def run(
        spec: ProblemSpec,
        hp: Hyperparameters,
        graph_seq: GraphSequenceSpec,
        oracle_cfg: OracleConfig,
        stop: StopConfig,
        monitor_period: int = 10,
        ref: ReferenceSolution = None,
        x0: np.ndarray = None,
        multi_gossip_T: int = 1,
        threads: int = 1,
        wall_clock: bool = False,
        verbose: bool = False,
):
    """
    Iterates the method and records metrics every monitor_period iterations.

    Args:
        spec: The problem.
        hp: The hyperparameters.
        graph_seq: The time-varying network. Iteration k uses round k.
        oracle_cfg: The gradient oracle.
        stop: The stopping rule. The criterion is checked at every snapshot.
        monitor_period: Iterations between two snapshots.
        ref: The reference solution. Computed if None.
        x0: The start, zero if None.
        multi_gossip_T: Gossip repetitions per iteration.
        threads: Threads for per-node gradient estimation. If 0, the number
            of threads is set to the number of available CPUs.
        wall_clock: Record elapsed seconds. Otherwise the column is 0.
        verbose: Print a progress line.

    Returns:
        The MetricsLog.
    """
    assert monitor_period >= 1, \
        f"monitor_period must be >= 1, got {monitor_period}"
    if ref is None:
        ref = reference_minimizer(spec)
    state = initial_state(spec.n, spec.d, x0)
    log = MetricsLog()
    start = time.perf_counter()
    comm, oracle = 0, 0

    def record():
        seconds = time.perf_counter() - start if wall_clock else 0.0
        row = snapshot(state, hp, spec, ref, comm, oracle, seconds)
        log.append(row)
        if verbose:
            print(f"\rIteration {state.k}/{stop.max_iters} criterion "
                  f"{row['criterion']:.4e}", end="")
        return stop.epsilon is not None and row["criterion"] <= stop.epsilon

    pool = None
    if threads != 1 and oracle_cfg.scheme != "exact":
        pool = ThreadPool(cpu_count() if threads == 0 else threads)
    try:
        def grad_fn(x_g, k):
            return estimate_gradients(spec, x_g, oracle_cfg, k, pool)

        log.converged = record()
        while not log.converged and state.k < stop.max_iters:
            state, rounds, calls = sadom_step(
                state, hp, gossip_round_for(graph_seq, state.k), grad_fn,
                multi_gossip_T)
            comm += rounds
            oracle += calls
            if state.k % monitor_period == 0 or state.k == stop.max_iters:
                log.converged = record()
    finally:
        if pool is not None:
            pool.close()
            pool.join()
    if verbose:
        print("")
    log.final_state = state
    return log
