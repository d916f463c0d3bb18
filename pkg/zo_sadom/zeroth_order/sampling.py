import numpy as np

from zo_sadom.objectives.problem import ProblemSpec, sample_values
from zo_sadom.utils.rng import keyed_generator, STREAM_RADIUS, STREAM_PROBE

CHUNK = 10000


def sphere_rows(
        rng: np.random.Generator,
        count: int,
        d: int,
):
    """
    Draws count directions uniformly on the unit sphere in R^d by
    normalizing standard Gaussian vectors.

    Args:
        rng: The generator.
        count: The number of rows.
        d: The dimension.

    Returns:
        A (count, d) array of unit rows.
    """
    rows = rng.standard_normal((count, d))
    norms = np.linalg.norm(rows, axis=1)
    while np.any(norms == 0):
        zero = norms == 0
        rows[zero] = rng.standard_normal((int(zero.sum()), d))
        norms = np.linalg.norm(rows, axis=1)
    return rows / norms[:, None]


def ball_rows(
        rng: np.random.Generator,
        count: int,
        d: int,
):
    """ Draws count points uniformly in the unit ball of R^d. """
    directions = sphere_rows(rng, count, d)
    radii = rng.uniform(0.0, 1.0, size=count) ** (1.0 / d)
    return directions * radii[:, None]


def sample_unit_sphere(
        d: int,
        key: tuple,
):
    """
    A uniform direction on the unit sphere as a pure function of the key.

    Args:
        d: The dimension, >= 1.
        key: The counter key, e.g. (seed, iteration, node, batch_index).

    Returns:
        A unit d-vector.
    """
    assert d >= 1, f"Dimension must be positive, got {d}"
    return sphere_rows(keyed_generator(*key), 1, d)[0]


def sample_unit_ball(
        d: int,
        key: tuple,
):
    """
    A uniform point in the unit ball: a sphere sample scaled by U^(1/d).

    Args:
        d: The dimension, >= 1.
        key: The counter key.

    Returns:
        A d-vector of norm at most 1.
    """
    direction = sample_unit_sphere(d, key)
    u = keyed_generator(*key, STREAM_RADIUS).uniform(0.0, 1.0)
    return direction * u ** (1.0 / d)


def smoothed_value(
        spec: ProblemSpec,
        x: np.ndarray,
        gamma: float,
        mc_samples: int,
        node: int = 0,
        seed: int = 0,
        return_std_err: bool = False,
):
    """
    Monte-Carlo estimate of the smoothed node function
    F_gamma(x) = E[f_node(x + gamma * e)] with e uniform in the unit ball.

    Args:
        spec: The problem.
        x: The d-vector.
        gamma: The smoothing radius.
        mc_samples: The number of ball samples.
        node: The node whose function is smoothed.
        seed: The sampling seed.
        return_std_err: Also return the standard error of the estimate.

    Returns:
        The estimate, and its standard error if requested.
    """
    assert mc_samples >= 1, f"Need at least one sample, got {mc_samples}"
    rng = keyed_generator(seed, node, STREAM_PROBE)
    points = np.asarray(x, dtype=float)[None, :] + \
        gamma * ball_rows(rng, mc_samples, spec.d)
    values = np.concatenate([
        sample_values(spec, node, points[start:start + CHUNK])
        for start in range(0, mc_samples, CHUNK)
    ])
    estimate = float(np.mean(values))
    if not return_std_err:
        return estimate
    std_err = float(np.std(values, ddof=1) / np.sqrt(mc_samples)) \
        if mc_samples > 1 else float("inf")
    return estimate, std_err


def smoothed_gradient(
        spec: ProblemSpec,
        x: np.ndarray,
        gamma: float,
        mc_samples: int,
        node: int = 0,
        seed: int = 0,
        h: float = 1e-5,
):
    """
    Monte-Carlo reference for the gradient of F_gamma: central differences
    of smoothed_value with common random numbers.

    Args:
        spec: The problem.
        x: The d-vector.
        gamma: The smoothing radius.
        mc_samples: The number of ball samples per evaluation.
        node: The node whose function is smoothed.
        seed: The sampling seed, shared by all evaluations.
        h: The difference step.

    Returns:
        The estimated gradient.
    """
    x = np.asarray(x, dtype=float)
    grad = np.zeros(spec.d)
    for j in range(spec.d):
        step = np.zeros(spec.d)
        step[j] = h
        upper = smoothed_value(spec, x + step, gamma, mc_samples, node, seed)
        lower = smoothed_value(spec, x - step, gamma, mc_samples, node, seed)
        grad[j] = (upper - lower) / (2 * h)
    return grad
