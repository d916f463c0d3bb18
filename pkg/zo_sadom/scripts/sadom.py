import argparse
from dataclasses import asdict, replace
import json
import os
import sys
import warnings
import numpy as np

from zo_sadom.harness.budget import budget_zo
from zo_sadom.harness.experiment import prepare_hyperparameters
from zo_sadom.network.gossip import gossip_round_for, check_gossip_round, \
    estimate_sequence_chi
from zo_sadom.network.graphs import build_graph
from zo_sadom.objectives.problem import make_problem, estimate_constants, \
    feasible_radius
from zo_sadom.objectives.reference import reference_minimizer
from zo_sadom.sadom.lyapunov import lyapunov
from zo_sadom.sadom.runner import run
from zo_sadom.sadom.step import initial_state
from zo_sadom.zeroth_order.bounds import variance_bound, bias_bound
from zo_sadom.zeroth_order.estimators import measure_estimator
from zo_sadom.utils.config import parse_config, config_to_dict, RunConfig, \
    ProblemConfig
from zo_sadom.utils.errors import ConfigError, UsageError
from zo_sadom.utils.filesystem import read_libsvm_file, read_dataset_cache, \
    write_dataset_cache, store_reference, load_reference, dump_graph_sequence
from zo_sadom.utils.handle_results import print_results, export_csv, \
    estimator_row, export_estimator_stats

ZO_SCHEMES = ["tpf", "opf_single", "opf_double"]


def thread_count():
    """ The parallelism cap from ZO_SADOM_THREADS, 0 (all CPUs) if unset. """
    value = os.environ.get("ZO_SADOM_THREADS", "0")
    try:
        threads = int(value)
    except ValueError as err:
        raise ConfigError(
            f"ZO_SADOM_THREADS must be an integer, got '{value}'") from err
    if threads < 0:
        raise ConfigError(f"ZO_SADOM_THREADS must be >= 0, got {threads}")
    return threads


def load_dataset(problem: ProblemConfig):
    """
    Loads the classification set of a logistic regression problem, from the
    binary cache if present, else from the LIBSVM file.

    Args:
        problem: The problem section.

    Returns:
        The Dataset, or None if no data file is configured.
    """
    if problem.data_path is None:
        return None
    if problem.cache_path is not None:
        ds = read_dataset_cache(problem.cache_path)
        if ds is not None:
            return ds
    ds = read_libsvm_file(
        problem.data_path, problem.dimension, problem.num_samples)
    if problem.cache_path is not None:
        write_dataset_cache(problem.cache_path, ds)
    return ds


def load_problem(cfg: RunConfig):
    """
    Builds the problem of a configuration, its reference solution and the
    constants M2 and G on the feasible ball.

    Args:
        cfg: The run configuration.

    Returns:
        The ProblemSpec and the ReferenceSolution.
    """
    problem = cfg.problem
    spec = make_problem(
        problem.kind, problem.nodes, problem.dimension, mu=problem.mu,
        lipschitz=problem.lipschitz, kappa=problem.kappa,
        samples_per_node=problem.samples_per_node,
        synthetic_samples=problem.num_samples,
        standard_sign=problem.standard_sign,
        dataset=load_dataset(problem) if problem.kind == "logreg" else None,
        seed=problem.seed)
    ref = None
    if problem.reference_path is not None:
        ref = load_reference(problem.reference_path)
    if ref is None:
        ref = reference_minimizer(spec, problem.reference_tol)
        if problem.reference_path is not None:
            store_reference(problem.reference_path, ref)
    radius = problem.radius
    if radius is None:
        radius = feasible_radius(np.zeros(spec.d), ref.x_star)
    return estimate_constants(spec, radius), ref


def hyperparameters_for(cfg: RunConfig, spec):
    """ Derives the hyperparameters of a configuration. """
    hyper = cfg.hyperparameters
    return prepare_hyperparameters(
        spec, cfg.graph, cfg.oracle, beta=hyper.beta, chi=hyper.chi,
        multi_gossip=hyper.multi_gossip, warmup_rounds=hyper.warmup_rounds,
        chi_safety=hyper.chi_safety)


def cmd_run(cfg: RunConfig, args):
    """ Runs the method and writes the metrics CSV. """
    spec, ref = load_problem(cfg)
    hp, rounds, chi, estimated = hyperparameters_for(cfg, spec)
    log = run(
        spec, hp, cfg.graph, cfg.oracle, cfg.stop,
        monitor_period=cfg.monitor_period, ref=ref, multi_gossip_T=rounds,
        threads=thread_count(), wall_clock=cfg.wall_clock,
        verbose=not args.quiet)
    source = f"estimated from {cfg.hyperparameters.warmup_rounds} warm-up " \
             f"rounds" if estimated else "configured"
    log.comments.extend([
        f"algorithm={cfg.algorithm} scheme={cfg.oracle.scheme} "
        f"seed={cfg.seed}",
        f"chi={chi!r} ({source}) gossip_rounds={rounds}",
        f"config={json.dumps(config_to_dict(cfg), sort_keys=True)}",
    ])
    export_csv(log, cfg.output)
    print_results(log.rows[-1])
    return 0 if log.converged else 2


def cmd_graph_info(cfg: RunConfig, args):
    """ Prints the spectrum of the warm-up rounds and the chi estimate. """
    graph_seq = cfg.graph
    results = []
    for p in range(cfg.hyperparameters.warmup_rounds):
        q = p * graph_seq.reseed_period
        gossip = gossip_round_for(graph_seq, q)
        results.append((f"round {q}", {
            "edges": len(build_graph(graph_seq, q).edges),
            "lambda_max": gossip.lambda_max,
            "lambda_min_plus": gossip.lambda_min_plus,
            "chi": gossip.chi_local,
        }))
    print_results(results)
    print_results({"chi": estimate_sequence_chi(
        graph_seq, cfg.hyperparameters.warmup_rounds,
        cfg.hyperparameters.chi_safety)})
    if args.dump is not None:
        dump_graph_sequence(
            args.dump, graph_seq,
            cfg.hyperparameters.warmup_rounds * graph_seq.reseed_period)
    return 0


def cmd_reference(cfg: RunConfig, args):
    """ Computes (or loads) and caches the reference solution. """
    spec, ref = load_problem(cfg)
    print_results({
        "kind": spec.kind,
        "f_star": ref.f_star,
        "tolerance": ref.tolerance,
        "norm_x_star": float(np.linalg.norm(ref.x_star)),
        "M2": spec.lipschitz_value,
        "G": spec.value_bound,
    })
    return 0


def cmd_verify_gossip(cfg: RunConfig, args):
    """ Checks the gossip contract on the warm-up rounds. """
    graph_seq = cfg.graph
    num_rounds = cfg.hyperparameters.warmup_rounds
    is_valid = 1
    for p in range(num_rounds):
        q = p * graph_seq.reseed_period
        print(f"\rChecking round {p + 1}/{num_rounds}", end="")
        is_valid &= check_gossip_round(
            gossip_round_for(graph_seq, q), build_graph(graph_seq, q),
            samples=args.samples, seed=cfg.seed)
    print("")
    print_results({"rounds": num_rounds, "valid": bool(is_valid)})
    return 0 if is_valid else 1


def cmd_verify_oracle(cfg: RunConfig, args):
    """
    Measures the second moment and bias of the estimators at the origin and
    compares them with the closed-form bounds.
    """
    spec, _ = load_problem(cfg)
    schemes = ZO_SCHEMES if cfg.oracle.scheme == "exact" \
        else [cfg.oracle.scheme]
    x = np.zeros(spec.d)
    rows = []
    is_valid = 1
    for scheme in schemes:
        oracle_cfg = replace(cfg.oracle, scheme=scheme)
        stats = measure_estimator(spec, x, oracle_cfg, args.samples)
        bound = variance_bound(oracle_cfg, spec)
        rows.append(estimator_row(
            oracle_cfg, spec.d, stats, bound, bias_bound(oracle_cfg, spec.d)))
        if stats.second_moment > bound + 3 * stats.second_moment_std_err:
            warnings.warn(
                f"{scheme}: second moment {stats.second_moment:.4e} above "
                f"the bound {bound:.4e}", UserWarning)
            is_valid = 0
    print_results([(r["scheme"], r) for r in rows])
    export_estimator_stats(rows, args.csv_file or cfg.output)
    return 0 if is_valid else 1


def budget_report(cfg: RunConfig, epsilon: float):
    """
    The budget of a configuration. C0 is the potential Psi_x + Psi_yz of
    the starting point, floored at epsilon.

    Args:
        cfg: The run configuration. An exact oracle is budgeted as tpf.
        epsilon: The target accuracy.

    Returns:
        The BudgetReport and the C0 used.
    """
    spec, ref = load_problem(cfg)
    scheme = "tpf" if cfg.oracle.scheme == "exact" else cfg.oracle.scheme
    hp, _, chi, _ = hyperparameters_for(
        replace(cfg, oracle=replace(cfg.oracle, scheme=scheme)), spec)
    psi0 = lyapunov(initial_state(spec.n, spec.d), hp, ref, spec).total
    c0_hat = max(psi0, epsilon)
    report = budget_zo(
        epsilon, spec.mu, spec.lipschitz_value, spec.d, chi,
        B=cfg.oracle.batch, scheme=scheme, G=spec.value_bound,
        c0_hat=c0_hat, multi_gossip=cfg.hyperparameters.multi_gossip,
        n_nodes=spec.n)
    return report, c0_hat


def cmd_budget(cfg: RunConfig, args):
    """ Prints the iteration, communication and oracle budgets. """
    epsilon = args.epsilon if args.epsilon is not None else cfg.stop.epsilon
    if epsilon is None:
        raise ConfigError(
            "budget needs a target accuracy", key="epsilon",
            location="stop.epsilon")
    report, c0_hat = budget_report(cfg, epsilon)
    print_results({**asdict(report), "c0_hat": c0_hat})
    return 0


COMMANDS = {
    "run": cmd_run,
    "graph-info": cmd_graph_info,
    "reference": cmd_reference,
    "verify-gossip": cmd_verify_gossip,
    "verify-oracle": cmd_verify_oracle,
    "budget": cmd_budget,
}


class ArgumentParser(argparse.ArgumentParser):
    """ Raises UsageError instead of printing the usage and exiting. """

    def error(self, message):
        raise UsageError(message)


def parse_args(argv=None):
    """ Parse arguments """
    parser = ArgumentParser(
        description='Decentralized (zeroth-order) optimization over '
                    'time-varying graphs.')
    subparsers = parser.add_subparsers(dest="command", required=True)
    subs = {name: subparsers.add_parser(name) for name in COMMANDS}
    for sub in subs.values():
        sub.add_argument('config', type=str)
        sub.add_argument(
            '--override', action="append", default=[], metavar="KEY=VALUE")
    subs["run"].add_argument('-q', '--quiet', action="store_true")
    subs["graph-info"].add_argument('--dump', type=str, default=None)
    subs["verify-gossip"].add_argument('--samples', type=int, default=1000)
    subs["verify-oracle"].add_argument('--samples', type=int, default=1000)
    subs["verify-oracle"].add_argument('--csv-file', type=str, default=None)
    subs["budget"].add_argument('--epsilon', type=float, default=None)
    args = parser.parse_args(argv)
    return args


def main(argv=None):
    """
    Main function that is called when the script is executed.

    Returns:
        The exit code: 0 on success, 1 on an error or a violated check,
        2 if a run did not certify its target accuracy. A run without
        stop.epsilon never certifies it.
    """
    try:
        args = parse_args(argv)
    except SystemExit as err:
        return 0 if err.code in (0, None) else 1
    except UsageError as err:
        print(f"error: UsageError: {err}", file=sys.stderr)
        return 1
    try:
        cfg = parse_config(args.config, args.override)
        return COMMANDS[args.command](cfg, args)
    except Exception as err:  # pylint: disable=broad-except
        message = " ".join(str(err).split())
        print(f"error: {type(err).__name__}: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
