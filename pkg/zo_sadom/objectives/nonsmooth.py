from dataclasses import dataclass
import numpy as np

from zo_sadom.utils.rng import keyed_generator, STREAM_DATA


@dataclass(frozen=True, eq=False)
class AbsData:
    """
    Samples (a_j, b_j) of a least absolute deviation node.

    Attributes:
        features: The (m, d) matrix with rows a_j.
        targets: The m real targets b_j.
    """
    features: np.ndarray
    targets: np.ndarray

    @property
    def m(self):
        return self.features.shape[0]


def nonsmooth_value_subgrad(
        node_data: AbsData,
        x: np.ndarray,
        mu: float,
):
    """
    Value and subgradient of f(x) = 1/m sum_j |<a_j, x> - b_j| + mu/2 ||x||^2.
    The subgradient of |.| is 0 at a kink.

    Args:
        node_data: The samples of the node.
        x: The point.
        mu: The strong convexity constant.

    Returns:
        The value and a subgradient.
    """
    x = np.asarray(x, dtype=float)
    residuals = node_data.features @ x - node_data.targets
    value = np.mean(np.abs(residuals)) + 0.5 * mu * float(x @ x)
    subgrad = node_data.features.T @ np.sign(residuals) / node_data.m + mu * x
    return float(value), subgrad


def random_abs_data(
        n: int,
        d: int,
        samples_per_node: int,
        seed: int = 0,
        noise: float = 0.1,
):
    """
    Generates per-node samples b = <a, x_true> + noise with Gaussian rows
    a ~ N(0, I/d).

    Args:
        n: The number of nodes.
        d: The dimension.
        samples_per_node: The number of rows per node.
        seed: The data seed.
        noise: The standard deviation of the target noise.

    Returns:
        A list of n AbsData.
    """
    x_true = keyed_generator(seed, n, d, STREAM_DATA).standard_normal(d)
    data = []
    for i in range(n):
        rng = keyed_generator(seed, i, STREAM_DATA)
        a = rng.standard_normal((samples_per_node, d)) / np.sqrt(d)
        b = a @ x_true + noise * rng.standard_normal(samples_per_node)
        data.append(AbsData(a, b))
    return data
