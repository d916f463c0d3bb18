from multiprocessing import Pool, cpu_count
import math

from zo_sadom.network.graphs import GraphSequenceSpec
from zo_sadom.network.gossip import estimate_sequence_chi, \
    multi_gossip_rounds, effective_chi
from zo_sadom.objectives.problem import ProblemSpec
from zo_sadom.objectives.reference import ReferenceSolution, \
    reference_minimizer
from zo_sadom.sadom.hyperparameters import derive_hyperparameters
from zo_sadom.sadom.runner import StopConfig, run
from zo_sadom.zeroth_order.estimators import OracleConfig
from zo_sadom.utils.errors import BadConstants, MissingConstant
from zo_sadom.utils.handle_results import store_summary

DEFAULT_THRESHOLDS = (1e-1, 1e-2, 1e-3)


def smoothness_for(
        spec: ProblemSpec,
        oracle_cfg: OracleConfig,
):
    """
    The gradient Lipschitz constant the hyperparameters are derived from.
    Exact gradients use L of the problem. Zeroth-order schemes optimize the
    smoothed function, whose constant is sqrt(d) M2 / gamma, capped by L
    for smooth problems.

    Args:
        spec: The problem.
        oracle_cfg: The oracle.

    Returns:
        The constant L.
    """
    if oracle_cfg.scheme == "exact":
        if not spec.is_smooth:
            raise BadConstants(
                f"'{spec.kind}' is not smooth, use a zeroth-order scheme")
        return spec.lipschitz_grad
    if spec.lipschitz_value is None:
        if spec.is_smooth:
            return spec.lipschitz_grad
        raise MissingConstant("Smoothed problems need M2 (lipschitz_value)")
    smoothed = math.sqrt(spec.d) * spec.lipschitz_value / oracle_cfg.gamma
    if spec.is_smooth:
        smoothed = min(smoothed, spec.lipschitz_grad)
    return max(smoothed, spec.mu)


def prepare_hyperparameters(
        spec: ProblemSpec,
        graph_seq: GraphSequenceSpec,
        oracle_cfg: OracleConfig,
        beta: float = None,
        chi: float = None,
        multi_gossip: bool = False,
        warmup_rounds: int = 100,
        chi_safety: float = 1.0,
):
    """
    Derives the hyperparameters of a run, estimating chi from a warm-up
    sample of the graph sequence when it is not given.

    Args:
        spec: The problem.
        graph_seq: The network.
        oracle_cfg: The oracle.
        beta: An optional beta override.
        chi: An optional chi bound.
        multi_gossip: Use T = ceil(chi ln 2) gossip repetitions.
        warmup_rounds: The warm-up sample size.
        chi_safety: The inflation factor of an estimated chi.

    Returns:
        The Hyperparameters, T, chi and a flag if chi was estimated.
    """
    estimated = chi is None
    if estimated:
        chi = estimate_sequence_chi(graph_seq, warmup_rounds, chi_safety)
    rounds = multi_gossip_rounds(chi) if multi_gossip else 1
    chi_used = effective_chi(chi, rounds) if multi_gossip else chi
    hp = derive_hyperparameters(
        spec.mu, smoothness_for(spec, oracle_cfg), chi_used, beta)
    return hp, rounds, chi, estimated


def threshold_hits(
        log,
        thresholds: tuple = DEFAULT_THRESHOLDS,
        relative: bool = True,
):
    """
    The counters at which the gap first falls below each threshold.

    Args:
        log: The MetricsLog.
        thresholds: The gap thresholds.
        relative: Interpret thresholds relative to the initial gap.

    Returns:
        A list of dicts {gap, comm, oracle}; comm and oracle are None if the
        threshold was not reached.
    """
    frame = log.to_frame()
    scale = float(frame["gap"].iloc[0]) if relative and len(frame) else 1.0
    hits = []
    for threshold in thresholds:
        level = threshold * scale
        reached = frame[frame["gap"] <= level]
        hits.append({
            "gap": level,
            "comm": int(reached["comm"].iloc[0]) if len(reached) else None,
            "oracle": int(reached["oracle"].iloc[0]) if len(reached) else None,
        })
    return hits


def run_topology(
        name: str,
        spec: ProblemSpec,
        graph_seq: GraphSequenceSpec,
        oracle_cfg: OracleConfig,
        stop: StopConfig,
        ref: ReferenceSolution,
        thresholds: tuple,
        relative: bool,
        monitor_period: int,
        multi_gossip: bool,
        beta: float,
        chi: float,
        warmup_rounds: int,
):
    """ Runs one topology and summarizes its threshold hits. """
    hp, rounds, _, _ = prepare_hyperparameters(
        spec, graph_seq, oracle_cfg, beta, chi, multi_gossip, warmup_rounds)
    log = run(spec, hp, graph_seq, oracle_cfg, stop, monitor_period, ref,
              multi_gossip_T=rounds)
    return {
        "topology": name,
        "thresholds": threshold_hits(log, thresholds, relative),
    }


def topology_ordering(summary: list):
    """
    Compares the communication rounds of two topologies at every threshold
    both reached.

    Args:
        summary: The result of compare_topologies.

    Returns:
        A dict with the name of the topology needing fewer rounds per gap
        level ('tie' if equal) and the oracle call ratio.
    """
    first, second = summary
    verdict = []
    for a, b in zip(first["thresholds"], second["thresholds"]):
        if a["comm"] is None or b["comm"] is None:
            continue
        if a["comm"] == b["comm"]:
            fewer = "tie"
        else:
            fewer = first["topology"] if a["comm"] < b["comm"] \
                else second["topology"]
        verdict.append({
            "gap": a["gap"],
            "fewer_comm": fewer,
            "oracle_ratio": a["oracle"] / b["oracle"] if b["oracle"] else None,
        })
    return verdict


def compare_topologies(
        spec: ProblemSpec,
        graph_specs: list,
        oracle_cfg: OracleConfig,
        stop: StopConfig,
        ref: ReferenceSolution = None,
        thresholds: tuple = DEFAULT_THRESHOLDS,
        relative: bool = True,
        monitor_period: int = 10,
        multi_gossip: bool = False,
        beta: float = None,
        chi: float = None,
        warmup_rounds: int = 100,
        threads: int = 0,
        json_file: str = None,
):
    """
    Runs the same problem and oracle over two graph sequences and reports
    the communication rounds and oracle calls needed per gap threshold.

    Args:
        spec: The problem.
        graph_specs: Two (name, GraphSequenceSpec) pairs.
        oracle_cfg: The oracle.
        stop: The stopping rule.
        ref: The reference solution. Computed if None.
        thresholds: The gap thresholds.
        relative: Thresholds relative to the initial gap.
        monitor_period: Iterations between snapshots.
        multi_gossip: Use multi-gossip in both runs.
        beta: An optional beta override.
        chi: An optional chi bound for both runs. Estimated per sequence if
            None.
        warmup_rounds: The warm-up sample size of the chi estimate.
        threads: The number of processes. If 0, the number of processes
            is set to the number of available CPUs.
        json_file: Stores the summary as JSON if given.

    Returns:
        A list of {topology, thresholds: [{gap, comm, oracle}]}.
    """
    assert len(graph_specs) == 2, \
        f"Expected two graph sequences, got {len(graph_specs)}"
    if ref is None:
        ref = reference_minimizer(spec)
    tasks = [
        (name, spec, graph_seq, oracle_cfg, stop, ref, tuple(thresholds),
         relative, monitor_period, multi_gossip, beta, chi, warmup_rounds)
        for name, graph_seq in graph_specs
    ]
    if threads != 1:
        if threads == 0:
            threads = cpu_count()
        with Pool(min(threads, len(tasks))) as p:
            summary = p.starmap(run_topology, tasks)
    else:
        summary = [run_topology(*t) for t in tasks]
    for verdict in topology_ordering(summary):
        print(f"gap {verdict['gap']:.3e}: fewer communication rounds with "
              f"{verdict['fewer_comm']}")
    if json_file is not None:
        store_summary(json_file, summary)
    return summary
