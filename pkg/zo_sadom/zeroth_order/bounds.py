import math

from zo_sadom.zeroth_order.estimators import OracleConfig
from zo_sadom.utils.errors import SchemeMismatch, MissingConstant


def scheme_variance(
        scheme: str,
        d: int,
        gamma: float,
        noise_bound: float = 0.0,
        m2: float = None,
        g: float = None,
):
    """
    Second moment bounds of the single-sample estimators:

        tpf:        2 sqrt(2) d (M2^2 + d D^2 / (sqrt(2) gamma^2))
        opf_single: 2 d^2 (G^2 + D^2) / gamma^2
        opf_double: 3 d^2 (3 M2^2 + 2 d D^2 / gamma^2)

    where D is the adversarial noise bound.

    Args:
        scheme: One of 'tpf', 'opf_single', 'opf_double'.
        d: The dimension.
        gamma: The smoothing radius.
        noise_bound: The noise bound D.
        m2: The Lipschitz constant of F(., xi).
        g: The bound on |F(x, xi)|.

    Returns:
        The bound on E||g||^2.
    """
    if scheme == "opf_single":
        if g is None:
            raise MissingConstant("opf_single needs the value bound G")
        return 2 * d ** 2 * (g ** 2 + noise_bound ** 2) / gamma ** 2
    if scheme not in ("tpf", "opf_double"):
        raise SchemeMismatch(f"No variance bound for scheme '{scheme}'")
    if m2 is None:
        raise MissingConstant(f"{scheme} needs the Lipschitz constant M2")
    if scheme == "tpf":
        return 2 * math.sqrt(2) * d * (
            m2 ** 2 + d * noise_bound ** 2 / (math.sqrt(2) * gamma ** 2))
    return 3 * d ** 2 * (3 * m2 ** 2 + 2 * d * noise_bound ** 2 / gamma ** 2)


def variance_bound(
        cfg: OracleConfig,
        spec,
):
    """
    The closed-form bound on E||g||^2 of a single-sample estimator.

    Args:
        cfg: The oracle configuration, scheme != 'exact'.
        spec: The ProblemSpec providing d, M2 (lipschitz_value) and G
            (value_bound).

    Returns:
        The variance bound.
    """
    if cfg.scheme == "exact":
        raise SchemeMismatch("The exact scheme has no variance bound")
    return scheme_variance(
        cfg.scheme, spec.d, cfg.gamma, cfg.noise_bound,
        spec.lipschitz_value, spec.value_bound)


def bias_bound(
        cfg: OracleConfig,
        d: int,
):
    """ The estimator bias bound d * noise_bound / gamma. """
    if cfg.scheme == "exact":
        return 0.0
    return d * cfg.noise_bound / cfg.gamma


def gamma_for_accuracy(
        epsilon: float,
        m2: float,
        d: int = 1,
):
    """
    The smoothing radius for an epsilon-accurate smoothed problem and the
    gradient Lipschitz constant of the smoothed function.

    Args:
        epsilon: The target accuracy.
        m2: The Lipschitz constant of F.
        d: The dimension.

    Returns:
        gamma = epsilon / (2 M2) and L = sqrt(d) M2 / gamma.
    """
    assert epsilon > 0 and m2 > 0, \
        f"epsilon and m2 must be positive, got {epsilon}, {m2}"
    gamma = epsilon / (2 * m2)
    return gamma, math.sqrt(d) * m2 / gamma
