from dataclasses import dataclass, field, fields, replace
import json

from zo_sadom.network.graphs import GraphSequenceSpec
from zo_sadom.sadom.runner import StopConfig
from zo_sadom.zeroth_order.estimators import OracleConfig
from zo_sadom.utils.errors import ConfigError

ALGORITHMS = ["sadom", "zo-sadom"]


@dataclass(frozen=True)
class ProblemConfig:
    """
    Selects and sizes the objective.

    Attributes:
        kind: 'logreg', 'quadratic' or 'nonsmooth_abs'.
        data_path: A LIBSVM file (logreg). Synthetic data if None.
        num_samples: The number of samples to keep or generate (logreg).
        dimension: The dimension d.
        nodes: The number of nodes n.
        kappa: The target condition number (logreg).
        mu: The strong convexity constant (quadratic, nonsmooth_abs).
        lipschitz: The largest Hessian eigenvalue (quadratic).
        samples_per_node: Rows per node (nonsmooth_abs).
        standard_sign: Use the standard logistic loss sign.
        cache_path: A binary dataset cache, written after the first parse.
        reference_path: A .npz cache of the reference solution.
        reference_tol: The reference tolerance, kind default if None.
        radius: The feasible radius for M2 and G, max(2 ||x0 - x*||, 1) if
            None.
        seed: The data seed, the run seed if None.
    """
    kind: str = "quadratic"
    data_path: str = None
    num_samples: int = None
    dimension: int = 5
    nodes: int = 10
    kappa: float = 1e5
    mu: float = 1.0
    lipschitz: float = 10.0
    samples_per_node: int = 10
    standard_sign: bool = False
    cache_path: str = None
    reference_path: str = None
    reference_tol: float = None
    radius: float = None
    seed: int = None


@dataclass(frozen=True)
class HyperparameterConfig:
    """
    Overrides of the derived hyperparameters.

    Attributes:
        beta: beta in (0, 1/(2L)], 1/(2L) if None.
        chi: The network condition bound, estimated if None.
        multi_gossip: Repeat gossip ceil(chi ln 2) times per iteration.
        warmup_rounds: Periods sampled to estimate chi.
        chi_safety: Inflation factor of the chi estimate.
    """
    beta: float = None
    chi: float = None
    multi_gossip: bool = False
    warmup_rounds: int = 100
    chi_safety: float = 1.0


@dataclass(frozen=True)
class RunConfig:
    """
    A complete experiment.

    Attributes:
        problem: The objective.
        graph: The network. Its n is the number of problem nodes.
        algorithm: 'sadom' or 'zo-sadom'.
        oracle: The gradient oracle.
        hyperparameters: The hyperparameter overrides.
        stop: The stopping rule.
        monitor_period: Iterations between two snapshots.
        output: The path of the metrics CSV.
        seed: The run seed, inherited by sections without their own.
        wall_clock: Record elapsed seconds in the CSV.
    """
    problem: ProblemConfig = field(default_factory=ProblemConfig)
    graph: GraphSequenceSpec = field(default_factory=GraphSequenceSpec)
    algorithm: str = "sadom"
    oracle: OracleConfig = field(default_factory=OracleConfig)
    hyperparameters: HyperparameterConfig = field(
        default_factory=HyperparameterConfig)
    stop: StopConfig = field(default_factory=StopConfig)
    monitor_period: int = 10
    output: str = "metrics.csv"
    seed: int = 0
    wall_clock: bool = False


SECTIONS = {
    "problem": ProblemConfig,
    "graph": GraphSequenceSpec,
    "oracle": OracleConfig,
    "hyperparameters": HyperparameterConfig,
    "stop": StopConfig,
}
# Keys of sections that are filled from elsewhere
DERIVED_KEYS = {"graph": {"n"}}


def parse_value(text: str):
    """ Parses an override value as JSON, falling back to the raw string. """
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(
        raw: dict,
        overrides: list,
):
    """
    Applies 'dotted.key=value' overrides to a raw configuration dictionary.

    Args:
        raw: The parsed JSON document.
        overrides: A list of override strings.

    Returns:
        The updated dictionary.
    """
    for override in overrides or []:
        key, sep, value = override.partition("=")
        if not sep or not key:
            raise ConfigError(
                f"override '{override}' is not of the form key=value",
                location="--override")
        node = raw
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(
                    f"'{part}' is not a section", key=key, location=key)
        node[parts[-1]] = parse_value(value)
    return raw


def _section(
        name: str,
        values,
        extra: dict,
):
    """ Builds one section dataclass, rejecting unknown keys. """
    cls = SECTIONS[name]
    if values is None:
        values = {}
    if not isinstance(values, dict):
        raise ConfigError("expected an object", key=name, location=name)
    allowed = {f.name for f in fields(cls)} - DERIVED_KEYS.get(name, set())
    for key in values:
        if key not in allowed:
            raise ConfigError(
                f"unknown key '{key}'", key=key, location=f"{name}.{key}")
    values = dict(values)
    if name == "graph" and "edge_lists" in values:
        values["edge_lists"] = tuple(
            tuple(tuple(edge) for edge in edges)
            for edges in values["edge_lists"])
    try:
        return cls(**{**extra, **values})
    except (TypeError, ValueError) as err:
        raise ConfigError(str(err), key=name, location=name) from err


def build_config(raw: dict):
    """
    Validates a raw configuration dictionary.

    Args:
        raw: The parsed JSON document.

    Returns:
        The RunConfig.
    """
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    allowed = {f.name for f in fields(RunConfig)}
    for key in raw:
        if key not in allowed:
            raise ConfigError(f"unknown key '{key}'", key=key, location=key)
    seed = raw.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError("seed must be an integer", key="seed",
                          location="seed")
    problem = _section("problem", raw.get("problem"), {})
    if problem.seed is None:
        problem = replace(problem, seed=seed)
    graph_values = raw.get("graph") or {}
    graph = _section("graph", graph_values, {
        "n": problem.nodes, "seed": seed})
    oracle = _section("oracle", raw.get("oracle"), {"seed": seed})
    hyper = _section("hyperparameters", raw.get("hyperparameters"), {})
    stop = _section("stop", raw.get("stop"), {})
    algorithm = raw.get("algorithm", "sadom")
    if algorithm not in ALGORITHMS:
        raise ConfigError(
            f"unknown algorithm '{algorithm}', expected one of {ALGORITHMS}",
            key="algorithm", location="algorithm")
    if algorithm == "zo-sadom" and oracle.scheme == "exact":
        raise ConfigError(
            "zo-sadom needs a zeroth-order oracle scheme", key="scheme",
            location="oracle.scheme")
    monitor_period = raw.get("monitor_period", 10)
    if not isinstance(monitor_period, int) or monitor_period < 1:
        raise ConfigError(
            "monitor_period must be a positive integer",
            key="monitor_period", location="monitor_period")
    if not isinstance(stop.max_iters, int) or stop.max_iters < 0:
        raise ConfigError(
            "max_iters must be a non-negative integer", key="max_iters",
            location="stop.max_iters")
    return RunConfig(
        problem=problem,
        graph=graph,
        algorithm=algorithm,
        oracle=oracle,
        hyperparameters=hyper,
        stop=stop,
        monitor_period=monitor_period,
        output=raw.get("output", "metrics.csv"),
        seed=seed,
        wall_clock=bool(raw.get("wall_clock", False)),
    )


def parse_config(
        path: str,
        overrides: list = None,
):
    """
    Reads a JSON experiment configuration. Unknown keys are rejected.

    Args:
        path: Path to the JSON file.
        overrides: 'dotted.key=value' strings applied before validation.

    Returns:
        The RunConfig.
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except json.JSONDecodeError as err:
        raise ConfigError(
            f"invalid JSON: {err.msg} (line {err.lineno})",
            location=path) from err
    return build_config(apply_overrides(raw, overrides))


def config_to_dict(cfg: RunConfig):
    """ The fully populated configuration as a JSON serializable dict. """
    def as_dict(section):
        return {f.name: getattr(section, f.name) for f in fields(section)}

    out = {
        "problem": as_dict(cfg.problem),
        "graph": as_dict(cfg.graph),
        "algorithm": cfg.algorithm,
        "oracle": as_dict(cfg.oracle),
        "hyperparameters": as_dict(cfg.hyperparameters),
        "stop": as_dict(cfg.stop),
        "monitor_period": cfg.monitor_period,
        "output": cfg.output,
        "seed": cfg.seed,
        "wall_clock": cfg.wall_clock,
    }
    out["graph"]["edge_lists"] = [
        [list(e) for e in edges] for edges in cfg.graph.edge_lists]
    return out
