from dataclasses import dataclass
import numpy as np

from zo_sadom.objectives.problem import ProblemSpec, sample_values, \
    num_samples, node_gradients, node_value_grad
from zo_sadom.zeroth_order.sampling import sphere_rows, smoothed_gradient
from zo_sadom.utils.errors import BadSpec, SchemeMismatch
from zo_sadom.utils.rng import keyed_generator, STREAM_DIRECTION, \
    STREAM_SAMPLE_PLUS, STREAM_SAMPLE_MINUS, STREAM_NOISE, STREAM_PROBE

SCHEMES = ["exact", "tpf", "opf_single", "opf_double"]
NOISE_KINDS = ["zero", "worst_case_sign", "uniform"]


@dataclass(frozen=True)
class OracleConfig:
    """
    Configuration of the gradient oracle.

    Attributes:
        scheme: One of SCHEMES. 'exact' uses true (sub)gradients.
        gamma: The smoothing radius, > 0 for zeroth-order schemes.
        batch: The number of estimates averaged per node and iteration.
        noise_bound: The bound on the adversarial value noise.
        noise_kind: One of NOISE_KINDS.
        seed: The seed of the oracle randomness.
    """
    scheme: str = "exact"
    gamma: float = 1e-3
    batch: int = 1
    noise_bound: float = 0.0
    noise_kind: str = "zero"
    seed: int = 0

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise BadSpec(
                f"Unknown scheme '{self.scheme}'. Existing schemes: {SCHEMES}")
        if self.noise_kind not in NOISE_KINDS:
            raise BadSpec(
                f"Unknown noise kind '{self.noise_kind}'. Existing kinds: "
                f"{NOISE_KINDS}")
        if self.scheme != "exact" and self.gamma <= 0:
            raise BadSpec(f"gamma must be positive, got {self.gamma}")
        if self.batch < 1:
            raise BadSpec(f"batch must be >= 1, got {self.batch}")
        if self.noise_bound < 0:
            raise BadSpec(
                f"noise_bound must be >= 0, got {self.noise_bound}")


@dataclass(frozen=True, eq=False)
class EstimatorStats:
    """
    Monte-Carlo statistics of a gradient estimator at a fixed point.

    Attributes:
        mean: The sample mean of the estimates.
        second_moment: The sample mean of ||g||^2.
        bias_norm: ||mean - reference gradient||.
        sample_count: The number of estimates.
        second_moment_std_err: The standard error of second_moment.
        bias_std_err: The standard error of the mean, in norm.
    """
    mean: np.ndarray
    second_moment: float
    bias_norm: float
    sample_count: int
    second_moment_std_err: float
    bias_std_err: float


def oracle_calls_per_node(cfg: OracleConfig):
    """ Oracle calls one node makes per iteration. """
    if cfg.scheme == "exact":
        return 1
    if cfg.scheme == "opf_single":
        return cfg.batch
    return 2 * cfg.batch


def adversarial_noise(
        cfg: OracleConfig,
        directions: np.ndarray,
        rng: np.random.Generator,
):
    """
    The value perturbations at x + gamma e and x - gamma e. worst_case_sign
    adds noise_bound * sign(<+-e, e_1>), which pushes the estimate along the
    first axis. uniform draws from U(-noise_bound, noise_bound).

    Args:
        cfg: The oracle configuration.
        directions: The (k, d) directions e.
        rng: The noise generator.

    Returns:
        The k perturbations at the plus points and at the minus points.
    """
    count = directions.shape[0]
    if cfg.noise_kind == "zero" or cfg.noise_bound == 0:
        return np.zeros(count), np.zeros(count)
    if cfg.noise_kind == "worst_case_sign":
        plus = cfg.noise_bound * np.sign(directions[:, 0])
        return plus, -plus
    draws = rng.uniform(-cfg.noise_bound, cfg.noise_bound, size=(count, 2))
    return draws[:, 0], draws[:, 1]


def directional_estimates(
        spec: ProblemSpec,
        node: int,
        x: np.ndarray,
        cfg: OracleConfig,
        count: int,
        key: tuple,
):
    """
    Draws count single-sample estimates at the d-vector x. Every random
    quantity comes from a generator keyed by key + (stream,).

    Args:
        spec: The problem.
        node: The node index.
        x: The evaluation point.
        cfg: The oracle configuration.
        count: The number of estimates.
        key: The counter key prefix.

    Returns:
        A (count, d) array of estimates.
    """
    if cfg.scheme == "exact":
        raise SchemeMismatch("The exact scheme has no zeroth-order estimate")
    gamma = cfg.gamma
    directions = sphere_rows(
        keyed_generator(*key, STREAM_DIRECTION), count, spec.d)
    m = num_samples(spec, node)
    idx_plus = keyed_generator(*key, STREAM_SAMPLE_PLUS).integers(
        0, m, size=count)
    if cfg.scheme == "opf_double":
        idx_minus = keyed_generator(*key, STREAM_SAMPLE_MINUS).integers(
            0, m, size=count)
    else:
        idx_minus = idx_plus
    noise_plus, noise_minus = adversarial_noise(
        cfg, directions, keyed_generator(*key, STREAM_NOISE))
    x = np.asarray(x, dtype=float)[None, :]
    plus = sample_values(spec, node, x + gamma * directions, idx_plus) + \
        noise_plus
    minus = None
    if cfg.scheme != "opf_single":
        minus = sample_values(
            spec, node, x - gamma * directions, idx_minus) + noise_minus
    return feedback_estimate(cfg.scheme, plus, minus, gamma, directions)


def feedback_estimate(
        scheme: str,
        values_plus: np.ndarray,
        values_minus: np.ndarray,
        gamma: float,
        directions: np.ndarray,
):
    """
    Turns oracle values into gradient estimates.

    tpf and opf_double: d / (2 gamma) (F(x + gamma e) - F(x - gamma e)) e
    opf_single:         d / gamma F(x + gamma e) e

    Args:
        scheme: One of 'tpf', 'opf_single', 'opf_double'.
        values_plus: The k values at x + gamma e.
        values_minus: The k values at x - gamma e (unused by opf_single).
        gamma: The smoothing radius.
        directions: The (k, d) directions e.

    Returns:
        The (k, d) estimates.
    """
    directions = np.atleast_2d(directions)
    d = directions.shape[1]
    values_plus = np.atleast_1d(values_plus)
    if scheme == "opf_single":
        return (d / gamma) * values_plus[:, None] * directions
    if scheme not in ("tpf", "opf_double"):
        raise SchemeMismatch(f"'{scheme}' is not a zeroth-order scheme")
    diff = values_plus - np.atleast_1d(values_minus)
    return (d / (2 * gamma)) * diff[:, None] * directions


def estimate_gradient(
        spec: ProblemSpec,
        x: np.ndarray,
        cfg: OracleConfig,
        iteration: int,
        node: int,
):
    """
    The batched zeroth-order gradient estimate of one node.

    Args:
        spec: The problem.
        x: The stacked iterate (the node's row is used) or the node's block.
        cfg: The oracle configuration, scheme != 'exact'.
        iteration: The iteration counter, part of the key.
        node: The node index, part of the key.

    Returns:
        The d-vector estimate, averaged over cfg.batch draws.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 2:
        x = x[node]
    estimates = directional_estimates(
        spec, node, x, cfg, cfg.batch, (cfg.seed, iteration, node))
    return np.mean(estimates, axis=0)


def estimate_gradients(
        spec: ProblemSpec,
        x: np.ndarray,
        cfg: OracleConfig,
        iteration: int,
        pool=None,
):
    """
    Gradient estimates of all nodes at a stacked iterate.

    Args:
        spec: The problem.
        x: The stacked iterate, shape (n, d).
        cfg: The oracle configuration.
        iteration: The iteration counter.
        pool: An optional multiprocessing.pool.ThreadPool. Results are
            gathered in node order.

    Returns:
        The stacked estimates and the number of oracle calls.
    """
    calls = oracle_calls_per_node(cfg) * spec.n
    if cfg.scheme == "exact":
        return node_gradients(spec, x), calls
    tasks = [(spec, x[i], cfg, iteration, i) for i in range(spec.n)]
    if pool is not None:
        blocks = pool.starmap(estimate_gradient, tasks)
    else:
        blocks = [estimate_gradient(*t) for t in tasks]
    return np.stack(blocks), calls


def measure_estimator(
        spec: ProblemSpec,
        x: np.ndarray,
        cfg: OracleConfig,
        samples: int,
        node: int = 0,
        reference_gradient: np.ndarray = None,
        reference_samples: int = 10000,
):
    """
    Measures the second moment and bias of the batched estimator at a point.

    Args:
        spec: The problem.
        x: The d-vector.
        cfg: The oracle configuration.
        samples: The number of batched estimates.
        node: The node whose oracle is measured.
        reference_gradient: The gradient of F_gamma at x. Estimated with
            smoothed_gradient if None (exact gradient for quadratics).
        reference_samples: The Monte-Carlo size of that estimate.

    Returns:
        The EstimatorStats.
    """
    assert samples >= 2, f"Need at least two samples, got {samples}"
    x = np.asarray(x, dtype=float)
    estimates = directional_estimates(
        spec, node, x, cfg, samples * cfg.batch,
        (cfg.seed, node, STREAM_PROBE, cfg.batch))
    estimates = estimates.reshape(samples, cfg.batch, spec.d).mean(axis=1)
    if reference_gradient is None:
        if spec.kind == "quadratic":
            reference_gradient = node_value_grad(spec, node, x)[1]
        else:
            reference_gradient = smoothed_gradient(
                spec, x, cfg.gamma, reference_samples, node, cfg.seed)
    mean = estimates.mean(axis=0)
    sq_norms = np.sum(np.square(estimates), axis=1)
    return EstimatorStats(
        mean=mean,
        second_moment=float(sq_norms.mean()),
        bias_norm=float(np.linalg.norm(mean - reference_gradient)),
        sample_count=samples,
        second_moment_std_err=float(sq_norms.std(ddof=1) / np.sqrt(samples)),
        bias_std_err=float(np.sqrt(
            np.sum(estimates.var(axis=0, ddof=1)) / samples)),
    )
