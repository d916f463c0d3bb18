from dataclasses import dataclass
import math

from zo_sadom.network.gossip import multi_gossip_rounds, effective_chi
from zo_sadom.zeroth_order.bounds import scheme_variance, gamma_for_accuracy
from zo_sadom.utils.errors import BadConstants, SchemeMismatch

# Power of d in the noise tolerance of each estimator
NOISE_DIMENSION_POWER = {"tpf": 1, "opf_single": 2, "opf_double": 3}


@dataclass(frozen=True)
class BudgetReport:
    """
    Iteration, communication and oracle budgets of the zeroth-order method.

    Attributes:
        n_iterations: The iteration count N.
        n_comm: The communication rounds N * T.
        n_oracle: The oracle calls over all nodes.
        delta_tilde_max: The tolerated adversarial noise bound.
        scheme: The estimator.
        batch: The batch size B.
        n_nodes: The number of nodes.
        gossip_rounds: The gossip repetitions T per iteration.
        chi_effective: The condition number entering the budget.
        sigma2: The estimator variance bound.
        gamma: The smoothing radius.
    """
    n_iterations: int
    n_comm: int
    n_oracle: int
    delta_tilde_max: float
    scheme: str
    batch: int
    n_nodes: int = 1
    gossip_rounds: int = 1
    chi_effective: float = 1.0
    sigma2: float = 0.0
    gamma: float = 0.0


def suggested_batch(
        epsilon: float,
        mu: float,
        m2: float,
        d: int,
):
    """ The batch d^(3/4) M2 / sqrt(epsilon mu) that balances both terms. """
    return max(1, math.ceil(d ** 0.75 * m2 / math.sqrt(epsilon * mu)))


def budget_zo(
        epsilon: float,
        mu: float,
        m2: float,
        d: int,
        chi: float,
        B: int = 1,
        scheme: str = "tpf",
        G: float = None,
        c0_hat: float = None,
        multi_gossip: bool = False,
        n_nodes: int = 1,
):
    """
    Evaluates the iteration budget

        N = max(64 chi d^(1/4) M2 / sqrt(epsilon mu) * max(1, ln(6 C0 / epsilon)),
                6 chi^2 sigma2 / (epsilon B mu))

    with sigma2 the variance bound of the scheme at zero noise and
    gamma = epsilon / (2 M2). The noise tolerance is

        D^2 = min(epsilon^(5/2) mu^(1/2) / (d^(7/4) M2 N),
                  B mu N epsilon^3 / (chi^2 M2^2 d^p))

    with p = 1, 2, 3 for tpf, opf_single, opf_double.

    Args:
        epsilon: The target accuracy.
        mu: The strong convexity constant.
        m2: The Lipschitz constant of F.
        d: The dimension.
        chi: The network condition number.
        B: The batch size.
        scheme: One of 'tpf', 'opf_single', 'opf_double'.
        G: The value bound, needed by opf_single.
        c0_hat: The initial constant of the log factor. The factor is 1 if
            None.
        multi_gossip: Repeat gossip T = ceil(chi ln 2) times per iteration.
        n_nodes: The number of nodes, for the oracle count.

    Returns:
        The BudgetReport.
    """
    if min(epsilon, mu, m2, d, chi, B, n_nodes) <= 0:
        raise BadConstants("Budget inputs must be positive")
    if scheme not in NOISE_DIMENSION_POWER:
        raise SchemeMismatch(f"No budget for scheme '{scheme}'")
    gamma, _ = gamma_for_accuracy(epsilon, m2, d)
    sigma2 = scheme_variance(scheme, d, gamma, 0.0, m2, G)
    rounds = multi_gossip_rounds(chi) if multi_gossip else 1
    chi_used = effective_chi(chi, rounds) if multi_gossip else chi
    log_factor = 1.0
    if c0_hat is not None:
        log_factor = max(1.0, math.log(6 * c0_hat / epsilon))
    first = 64 * chi_used * d ** 0.25 * m2 / math.sqrt(epsilon * mu) * \
        log_factor
    second = 6 * chi_used ** 2 * sigma2 / (epsilon * B * mu)
    n_iterations = math.ceil(max(first, second))
    calls = 1 if scheme == "opf_single" else 2
    power = NOISE_DIMENSION_POWER[scheme]
    delta2 = min(
        epsilon ** 2.5 * mu ** 0.5 / (d ** 1.75 * m2 * n_iterations),
        B * mu * n_iterations * epsilon ** 3 /
        (chi_used ** 2 * m2 ** 2 * d ** power))
    return BudgetReport(
        n_iterations=n_iterations,
        n_comm=n_iterations * rounds,
        n_oracle=n_iterations * B * calls * n_nodes,
        delta_tilde_max=math.sqrt(delta2),
        scheme=scheme,
        batch=B,
        n_nodes=n_nodes,
        gossip_rounds=rounds,
        chi_effective=chi_used,
        sigma2=sigma2,
        gamma=gamma,
    )
