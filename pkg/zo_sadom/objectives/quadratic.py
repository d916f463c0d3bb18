from dataclasses import dataclass
import numpy as np

from zo_sadom.utils.rng import keyed_generator, STREAM_DATA


@dataclass(frozen=True, eq=False)
class QuadraticNode:
    """
    The node function f(x) = 1/2 (x - c)^T H (x - c).

    Attributes:
        hessian: The symmetric positive definite (d, d) matrix H.
        center: The d-vector c.
    """
    hessian: np.ndarray
    center: np.ndarray


def quadratic_value_grad(
        node: QuadraticNode,
        x: np.ndarray,
):
    """ Value and gradient of a quadratic node function. """
    diff = np.asarray(x, dtype=float) - node.center
    grad = node.hessian @ diff
    return 0.5 * float(diff @ grad), grad


def quadratic_values(
        node: QuadraticNode,
        points: np.ndarray,
):
    """ Vectorized values at the rows of points. """
    diff = np.asarray(points, dtype=float) - node.center[None, :]
    return 0.5 * np.einsum("ki,ij,kj->k", diff, node.hessian, diff)


def random_quadratic_nodes(
        n: int,
        d: int,
        mu: float,
        lipschitz: float,
        seed: int = 0,
):
    """
    Generates n quadratic nodes whose Hessian spectra lie in [mu, L]. For
    d >= 2 every spectrum contains both mu and L.

    Args:
        n: The number of nodes.
        d: The dimension.
        mu: The smallest eigenvalue.
        lipschitz: The largest eigenvalue L.
        seed: The data seed.

    Returns:
        A list of QuadraticNode.
    """
    nodes = []
    for i in range(n):
        rng = keyed_generator(seed, i, STREAM_DATA)
        q, _ = np.linalg.qr(rng.standard_normal((d, d)))
        if d == 1:
            spectrum = rng.uniform(mu, lipschitz, size=1)
        else:
            spectrum = np.concatenate((
                [mu], rng.uniform(mu, lipschitz, size=d - 2), [lipschitz]))
        hessian = (q * spectrum) @ q.T
        hessian = 0.5 * (hessian + hessian.T)
        nodes.append(QuadraticNode(hessian, rng.standard_normal(d)))
    return nodes
