from dataclasses import dataclass
import math

from zo_sadom.utils.errors import BadConstants


@dataclass(frozen=True)
class Hyperparameters:
    """
    Step sizes and momentum weights of the accelerated decentralized method.

    Attributes:
        tau1, tau2: Momentum weights of the primal sequences.
        eta: The primal step size.
        alpha: The primal proximal weight.
        nu: The splitting constant, strictly inside (0, mu).
        beta: The dual step parameter, at most 1/(2L).
        theta: The dual step size.
        vartheta1, vartheta2: Momentum weights of the dual sequences.
        pi_: The z-proximal weight.
        varkappa: The gossip step size.
        zeta: The z_f gossip weight.
        chi: The network condition number bound.
        mu: The strong convexity constant.
        L: The gradient Lipschitz constant.
    """
    tau1: float
    tau2: float
    eta: float
    alpha: float
    nu: float
    beta: float
    theta: float
    vartheta1: float
    vartheta2: float
    pi_: float
    varkappa: float
    zeta: float
    chi: float
    mu: float
    L: float


def derive_hyperparameters(
        mu: float,
        L: float,
        chi: float,
        beta_override: float = None,
):
    """
    Derives all hyperparameters from the problem and network constants.

        tau2 = sqrt(mu/L)               tau1 = (1/tau2 + 1/2)^-1
        eta = ((1/beta + L) tau2)^-1    alpha = mu/4,  nu = mu/2
        vartheta2 = sqrt(beta mu) / (16 chi)
        vartheta1 = (1/vartheta2 + 1/2)^-1
        pi = beta/16                    varkappa = nu / (14 vartheta2 chi^2)
        theta = nu / (4 vartheta2)      zeta = 1/2

    Args:
        mu: The strong convexity constant, 0 < mu <= L.
        L: The gradient Lipschitz constant.
        chi: The network condition number, >= 1.
        beta_override: beta in (0, 1/(2L)]. Defaults to 1/(2L).

    Returns:
        The Hyperparameters.
    """
    if not 0 < mu <= L:
        raise BadConstants(f"Need 0 < mu <= L, got mu={mu}, L={L}")
    if chi < 1:
        raise BadConstants(f"Need chi >= 1, got {chi}")
    beta_cap = 1 / (2 * L)
    beta = beta_cap if beta_override is None else beta_override
    if not 0 < beta <= beta_cap * (1 + 1e-12):
        raise BadConstants(f"Need 0 < beta <= 1/(2L) = {beta_cap}, got {beta}")
    tau2 = math.sqrt(mu / L)
    nu = mu / 2
    vartheta2 = math.sqrt(beta * mu) / (16 * chi)
    return Hyperparameters(
        tau1=1 / (1 / tau2 + 0.5),
        tau2=tau2,
        eta=1 / ((1 / beta + L) * tau2),
        alpha=mu / 4,
        nu=nu,
        beta=beta,
        theta=nu / (4 * vartheta2),
        vartheta1=1 / (1 / vartheta2 + 0.5),
        vartheta2=vartheta2,
        pi_=beta / 16,
        varkappa=nu / (14 * vartheta2 * chi ** 2),
        zeta=0.5,
        chi=chi,
        mu=mu,
        L=L,
    )


def contraction_factor(hp: Hyperparameters):
    """ The per-iteration rate 1 - sqrt(beta mu) / (32 chi). """
    return 1 - math.sqrt(hp.beta * hp.mu) / (32 * hp.chi)


def beta_schedule(
        mu: float,
        L: float,
        chi: float,
        N: int,
        sigma2: float,
        c0_estimate: float,
):
    """
    Chooses beta for an N-iteration budget, balancing the geometric term
    against the stochastic term:

        sqrt(beta) = min(1/sqrt(2L), ln(max(2, a r0 N / (b sigma2))) / (a N))

    with a = sqrt(mu) / (32 chi) and b = 64 chi / mu^(3/2).

    Args:
        mu: The strong convexity constant.
        L: The gradient Lipschitz constant.
        chi: The network condition number.
        N: The number of iterations, >= 1.
        sigma2: The gradient noise variance.
        c0_estimate: The initial error r0.

    Returns:
        beta, always at most 1/(2L).
    """
    assert N >= 1, f"N must be >= 1, got {N}"
    cap = 1 / math.sqrt(2 * L)
    if sigma2 <= 0:
        return cap ** 2
    a = math.sqrt(mu) / (32 * chi)
    b = 64 * chi / mu ** 1.5
    ratio = max(2.0, a * c0_estimate * N / (b * sigma2))
    return min(cap, math.log(ratio) / (a * N)) ** 2


def sadom_error_bound(
        hp: Hyperparameters,
        N: int,
        c0: float,
        sigma2: float = 0.0,
        delta: float = 0.0,
        batch: int = 1,
):
    """
    Evaluates the convergence bound after N iterations with batching:

        rho^N c0 + 64 chi / mu^(3/2) sigma2 / B sqrt(beta)
                 + 128 chi / (sqrt(beta L) mu^2) delta^2

    Args:
        hp: The hyperparameters.
        N: The number of iterations.
        c0: The initial constant.
        sigma2: The gradient noise variance.
        delta: The gradient bias bound.
        batch: The batch size B.

    Returns:
        The bound on E[||x - x*||^2 + 2/mu (F(x_f) - F* - mu/4 ||x_f - x*||^2)].
    """
    deterministic = contraction_factor(hp) ** N * c0
    stochastic = 64 * hp.chi / hp.mu ** 1.5 * sigma2 / batch * \
        math.sqrt(hp.beta)
    bias = 128 * hp.chi / (math.sqrt(hp.beta * hp.L) * hp.mu ** 2) * \
        delta ** 2
    return deterministic + stochastic + bias
