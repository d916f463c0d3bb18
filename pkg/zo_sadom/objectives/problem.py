from dataclasses import dataclass, replace
import numpy as np

from zo_sadom.objectives.logreg import Dataset, partition, \
    logreg_value_grad, logreg_hessian, calibrate_regularizer, data_smoothness, \
    synthetic_classification
from zo_sadom.objectives.quadratic import QuadraticNode, \
    quadratic_value_grad, quadratic_values, random_quadratic_nodes
from zo_sadom.objectives.nonsmooth import nonsmooth_value_subgrad, \
    random_abs_data
from zo_sadom.utils.errors import BadSpec, DimensionMismatch
from zo_sadom.utils.stacked import as_stacked

PROBLEM_KINDS = ["logreg", "quadratic", "nonsmooth_abs"]
SMOOTH_KINDS = ["logreg", "quadratic"]


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """
    A decentralized objective: node i holds f_i and the nodes minimize
    sum_i f_i(x).

    Attributes:
        kind: One of PROBLEM_KINDS.
        n: The number of nodes.
        d: The dimension.
        mu: The strong convexity constant of every f_i.
        lipschitz_grad: The gradient Lipschitz constant L of every f_i. None
            for non-smooth kinds.
        lipschitz_value: The Lipschitz constant M2 of F(., xi) on the
            feasible ball. None until estimated.
        value_bound: The bound G on |F(x, xi)| on the feasible ball. None
            until estimated.
        per_node_data: A tuple with one payload per node: Dataset (logreg),
            QuadraticNode (quadratic) or AbsData (nonsmooth_abs).
        regularizer: The l2 regularizer r of the logistic loss.
        sign: The margin sign of the logistic loss, +1 literal, -1 standard.
        radius: The radius of the feasible ball the constants refer to.
    """
    kind: str
    n: int
    d: int
    mu: float
    lipschitz_grad: float = None
    lipschitz_value: float = None
    value_bound: float = None
    per_node_data: tuple = ()
    regularizer: float = 0.0
    sign: float = 1.0
    radius: float = None

    def __post_init__(self):
        if self.kind not in PROBLEM_KINDS:
            raise BadSpec(
                f"Unknown problem kind '{self.kind}'. Existing kinds: "
                f"{PROBLEM_KINDS}")
        if self.mu <= 0:
            raise BadSpec(f"mu must be positive, got {self.mu}")
        if self.is_smooth and (
                self.lipschitz_grad is None or self.lipschitz_grad < self.mu):
            raise BadSpec(
                f"Smooth problems need L >= mu, got L={self.lipschitz_grad}, "
                f"mu={self.mu}")
        if len(self.per_node_data) != self.n:
            raise BadSpec(
                f"Expected {self.n} node payloads, got "
                f"{len(self.per_node_data)}")
        object.__setattr__(self, "per_node_data", tuple(self.per_node_data))

    @property
    def is_smooth(self):
        return self.kind in SMOOTH_KINDS


def make_quadratic_problem(
        n: int,
        d: int,
        mu: float = 1.0,
        lipschitz: float = 10.0,
        seed: int = 0,
):
    """
    Creates the quadratic suite f_i(x) = 1/2 (x - c_i)^T H_i (x - c_i).

    Args:
        n: The number of nodes.
        d: The dimension.
        mu: The smallest Hessian eigenvalue.
        lipschitz: The largest Hessian eigenvalue.
        seed: The data seed.

    Returns:
        The ProblemSpec.
    """
    if not 0 < mu <= lipschitz:
        raise BadSpec(f"Need 0 < mu <= L, got mu={mu}, L={lipschitz}")
    nodes = random_quadratic_nodes(n, d, mu, lipschitz, seed)
    return ProblemSpec(
        kind="quadratic", n=n, d=d, mu=mu, lipschitz_grad=lipschitz,
        per_node_data=tuple(nodes))


def make_nonsmooth_problem(
        n: int,
        d: int,
        samples_per_node: int = 10,
        mu: float = 0.1,
        seed: int = 0,
):
    """
    Creates the suite f_i(x) = 1/m sum_j |<a_ij, x> - b_ij| + mu/2 ||x||^2.

    Args:
        n: The number of nodes.
        d: The dimension.
        samples_per_node: The number of rows per node.
        mu: The strong convexity constant.
        seed: The data seed.

    Returns:
        The ProblemSpec.
    """
    data = random_abs_data(n, d, samples_per_node, seed)
    return ProblemSpec(
        kind="nonsmooth_abs", n=n, d=d, mu=mu, per_node_data=tuple(data))


def make_logreg_problem(
        dataset: Dataset,
        n: int,
        kappa: float = 1e5,
        standard_sign: bool = False,
):
    """
    Distributes a classification set over n nodes and calibrates the
    regularizer to the target condition number of the pooled loss.

    Args:
        dataset: The pooled data set.
        n: The number of nodes.
        kappa: The target condition number.
        standard_sign: Use log(1 + exp(-b a^T x)) instead of the literal
            log(1 + exp(b a^T x)).

    Returns:
        The ProblemSpec. mu = r; L is the largest smoothness of the node
        losses plus r, so it can exceed the pooled L_data + r.
    """
    nodes = partition(dataset, n)
    r = calibrate_regularizer(dataset, kappa)
    l_data = max(
        data_smoothness(dataset), *[data_smoothness(ds) for ds in nodes])
    return ProblemSpec(
        kind="logreg", n=n, d=dataset.d, mu=r, lipschitz_grad=l_data + r,
        per_node_data=tuple(nodes), regularizer=r,
        sign=-1.0 if standard_sign else 1.0)


def make_problem(
        kind: str,
        n: int,
        d: int,
        mu: float = 1.0,
        lipschitz: float = 10.0,
        kappa: float = 1e5,
        samples_per_node: int = 10,
        synthetic_samples: int = None,
        standard_sign: bool = False,
        dataset: Dataset = None,
        seed: int = 0,
):
    """
    Builds a problem of the given kind.

    Args:
        kind: One of PROBLEM_KINDS.
        n: The number of nodes.
        d: The dimension.
        mu: The strong convexity constant (quadratic, nonsmooth_abs).
        lipschitz: The largest Hessian eigenvalue (quadratic).
        kappa: The target condition number (logreg).
        samples_per_node: Rows per node (nonsmooth_abs).
        synthetic_samples: The size of the synthetic classification set
            (logreg without dataset). 100 per node if None.
        standard_sign: Use the standard logistic loss sign (logreg).
        dataset: The classification set (logreg). Synthetic if None.
        seed: The data seed.

    Returns:
        The ProblemSpec.
    """
    if kind == "quadratic":
        return make_quadratic_problem(n, d, mu, lipschitz, seed)
    if kind == "nonsmooth_abs":
        return make_nonsmooth_problem(n, d, samples_per_node, mu, seed)
    if kind == "logreg":
        if dataset is None:
            dataset = synthetic_classification(
                synthetic_samples or 100 * n, d, seed)
        return make_logreg_problem(dataset, n, kappa, standard_sign)
    raise BadSpec(
        f"Unknown problem kind '{kind}'. Existing kinds: {PROBLEM_KINDS}")


def num_samples(
        spec: ProblemSpec,
        node: int,
):
    """ The number of stochastic realizations xi at a node. """
    payload = spec.per_node_data[node]
    if isinstance(payload, QuadraticNode):
        return 1
    return payload.m


def node_value_grad(
        spec: ProblemSpec,
        node: int,
        x: np.ndarray,
):
    """
    Value and (sub)gradient of f_node at x.

    Args:
        spec: The problem.
        node: The node index.
        x: The d-vector.

    Returns:
        The value and the gradient.
    """
    payload = spec.per_node_data[node]
    if spec.kind == "logreg":
        return logreg_value_grad(payload, x, spec.regularizer, spec.sign)
    if spec.kind == "quadratic":
        return quadratic_value_grad(payload, x)
    return nonsmooth_value_subgrad(payload, x, spec.mu)


def sample_values(
        spec: ProblemSpec,
        node: int,
        points: np.ndarray,
        sample_idx: np.ndarray = None,
):
    """
    Evaluates the stochastic oracle F(x, xi) of a node at a batch of points,
    where xi is one sample index per point. Quadratic nodes ignore xi.

    Args:
        spec: The problem.
        node: The node index.
        points: The (k, d) evaluation points.
        sample_idx: The k sample indices. If None, the full-data value
            f_node is returned.

    Returns:
        The k values.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != spec.d:
        raise DimensionMismatch(
            f"Expected points of shape (k, {spec.d}), got {points.shape}")
    payload = spec.per_node_data[node]
    if spec.kind == "quadratic":
        return quadratic_values(payload, points)
    sq = 0.5 * np.sum(np.square(points), axis=1)
    if sample_idx is None:
        products = points @ payload.features.T
        if spec.kind == "logreg":
            margins = spec.sign * payload.labels[None, :] * products
            return np.mean(np.logaddexp(0.0, margins), axis=1) + \
                spec.regularizer * sq
        return np.mean(np.abs(products - payload.targets[None, :]), axis=1) \
            + spec.mu * sq
    sample_idx = np.asarray(sample_idx)
    rows = payload.features[sample_idx]
    products = np.sum(rows * points, axis=1)
    if spec.kind == "logreg":
        margins = spec.sign * payload.labels[sample_idx] * products
        return np.logaddexp(0.0, margins) + spec.regularizer * sq
    return np.abs(products - payload.targets[sample_idx]) + spec.mu * sq


def node_values(
        spec: ProblemSpec,
        x: np.ndarray,
):
    """ The values f_i(x_i) of a stacked vector, shape (n,). """
    x = as_stacked(x, spec.n, spec.d)
    return np.array([node_value_grad(spec, i, x[i])[0] for i in range(spec.n)])


def node_gradients(
        spec: ProblemSpec,
        x: np.ndarray,
):
    """ The stacked gradients (grad f_i(x_i))_i of a stacked vector. """
    x = as_stacked(x, spec.n, spec.d)
    return np.stack([node_value_grad(spec, i, x[i])[1] for i in range(spec.n)])


def pooled_value(
        spec: ProblemSpec,
        x: np.ndarray,
):
    """ The objective sum_i f_i(x) at a d-vector. """
    return float(sum(node_value_grad(spec, i, x)[0] for i in range(spec.n)))


def pooled_gradient(
        spec: ProblemSpec,
        x: np.ndarray,
):
    """ The gradient sum_i grad f_i(x) at a d-vector. """
    return np.sum(
        [node_value_grad(spec, i, x)[1] for i in range(spec.n)], axis=0)


def pooled_hessian(
        spec: ProblemSpec,
        x: np.ndarray,
):
    """
    The Hessian of sum_i f_i at a d-vector.

    Args:
        spec: A smooth problem.
        x: The point.

    Returns:
        The (d, d) Hessian.
    """
    if not spec.is_smooth:
        raise BadSpec(f"'{spec.kind}' has no Hessian")
    if spec.kind == "quadratic":
        return np.sum([node.hessian for node in spec.per_node_data], axis=0)
    return np.sum([
        logreg_hessian(ds, x, spec.regularizer, spec.sign)
        for ds in spec.per_node_data
    ], axis=0)


def estimate_constants(
        spec: ProblemSpec,
        radius: float,
):
    """
    Bounds M2 (Lipschitz constant of F(., xi)) and G (bound on |F(x, xi)|)
    over the ball of the given radius around the origin.

    Args:
        spec: The problem.
        radius: The radius R of the feasible ball.

    Returns:
        A copy of spec with lipschitz_value, value_bound and radius set.
    """
    assert radius > 0, f"radius must be positive, got {radius}"
    if spec.kind == "quadratic":
        m2, g = 0.0, 0.0
        for node in spec.per_node_data:
            top = float(np.linalg.eigvalsh(node.hessian)[-1])
            reach = radius + float(np.linalg.norm(node.center))
            m2 = max(m2, top * reach)
            g = max(g, 0.5 * top * reach ** 2)
    else:
        a_max = max(
            float(np.max(np.linalg.norm(p.features, axis=1)))
            for p in spec.per_node_data)
        if spec.kind == "logreg":
            m2 = a_max + spec.regularizer * radius
            g = float(np.logaddexp(0.0, a_max * radius)) + \
                0.5 * spec.regularizer * radius ** 2
        else:
            b_max = max(
                float(np.max(np.abs(p.targets))) for p in spec.per_node_data)
            m2 = a_max + spec.mu * radius
            g = a_max * radius + b_max + 0.5 * spec.mu * radius ** 2
    return replace(spec, lipschitz_value=m2, value_bound=g, radius=radius)


def feasible_radius(
        x0: np.ndarray,
        x_star: np.ndarray,
):
    """ The default feasible radius max(2 ||x0 - x*||, 1). """
    return max(2.0 * float(np.linalg.norm(
        np.asarray(x0) - np.asarray(x_star))), 1.0)
