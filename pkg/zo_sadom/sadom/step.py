from dataclasses import dataclass, replace
import numpy as np

from zo_sadom.network.gossip import GossipRound, gossip_apply, \
    multi_gossip_apply
from zo_sadom.sadom.hyperparameters import Hyperparameters
from zo_sadom.utils.stacked import as_stacked, broadcast


@dataclass(frozen=True, eq=False)
class SadomState:
    """
    The iterates of the method. Every field is a stacked (n, d) array.

    Attributes:
        x, x_f: The primal sequences.
        y, y_f: The dual sequences of the gradient coupling.
        z, z_f: The dual sequences of the consensus constraint, with zero
            block sum.
        m: The error feedback sequence of the gossip step.
        k: The iteration counter.
        x_g, y_g, z_g: The extrapolated points of the last step, None before
            the first step.
    """
    x: np.ndarray
    x_f: np.ndarray
    y: np.ndarray
    y_f: np.ndarray
    z: np.ndarray
    z_f: np.ndarray
    m: np.ndarray
    k: int = 0
    x_g: np.ndarray = None
    y_g: np.ndarray = None
    z_g: np.ndarray = None

    @property
    def shape(self):
        return self.x.shape


def initial_state(
        n: int,
        d: int,
        x0: np.ndarray = None,
):
    """
    The starting point x0 = x_f0 = broadcast of x0 (zero by default) and
    y0 = z0 = m0 = 0.

    Args:
        n: The number of nodes.
        d: The dimension.
        x0: A d-vector or a stacked (n, d) start.

    Returns:
        The SadomState at k = 0.
    """
    if x0 is None:
        x = np.zeros((n, d))
    else:
        x0 = np.asarray(x0, dtype=float)
        x = broadcast(x0, n) if x0.ndim == 1 else as_stacked(x0, n, d).copy()
    zeros = np.zeros((n, d))
    return SadomState(
        x=x, x_f=x.copy(), y=zeros, y_f=zeros.copy(), z=zeros.copy(),
        z_f=zeros.copy(), m=zeros.copy())


def implicit_solution(
        hp: Hyperparameters,
        u: np.ndarray,
        v: np.ndarray,
):
    """
    Solves, per coordinate,

        (1 + eta alpha) x' - eta y'   = u
        theta x' + (1 + theta beta) y' = v

    Args:
        hp: The hyperparameters.
        u: The explicit part of the x update.
        v: The explicit part of the y update.

    Returns:
        x' and y'.
    """
    a = 1 + hp.eta * hp.alpha
    b = 1 + hp.theta * hp.beta
    det = a * b + hp.eta * hp.theta
    return (b * u + hp.eta * v) / det, (a * v - hp.theta * u) / det


def solve_implicit_xy(
        hp: Hyperparameters,
        x_k: np.ndarray,
        x_g: np.ndarray,
        y_k: np.ndarray,
        y_g: np.ndarray,
        z_g: np.ndarray,
        g: np.ndarray,
):
    """
    Performs the coupled x and y updates

        x' = x + eta alpha (x_g - x') - eta (g - nu x_g - y')
        y' = y + theta beta (g - nu x_g - y') - theta (1/nu (y_g + z_g) + x')

    by eliminating the implicit terms.

    Args:
        hp: The hyperparameters.
        x_k: The current x.
        x_g: The extrapolated x.
        y_k: The current y.
        y_g: The extrapolated y.
        z_g: The extrapolated z.
        g: The gradient estimate at x_g.

    Returns:
        The next x and y.
    """
    shifted = g - hp.nu * x_g
    u = x_k + hp.eta * hp.alpha * x_g - hp.eta * shifted
    v = y_k + hp.theta * hp.beta * shifted - hp.theta / hp.nu * (y_g + z_g)
    return implicit_solution(hp, u, v)


def implicit_residuals(
        hp: Hyperparameters,
        x_k: np.ndarray,
        x_g: np.ndarray,
        y_k: np.ndarray,
        y_g: np.ndarray,
        z_g: np.ndarray,
        g: np.ndarray,
        x_next: np.ndarray,
        y_next: np.ndarray,
):
    """
    Relative residuals of the two implicit update equations at a candidate
    pair (x_next, y_next).

    Returns:
        The residual norms of the x and the y equation, each divided by
        1 + the norm of its left-hand side.
    """
    shifted = g - hp.nu * x_g
    rx = x_k + hp.eta * hp.alpha * (x_g - x_next) - \
        hp.eta * (shifted - y_next) - x_next
    ry = y_k + hp.theta * hp.beta * (shifted - y_next) - \
        hp.theta * ((y_g + z_g) / hp.nu + x_next) - y_next
    return (float(np.linalg.norm(rx) / (1 + np.linalg.norm(x_next))),
            float(np.linalg.norm(ry) / (1 + np.linalg.norm(y_next))))


def sadom_step(
        state: SadomState,
        hp: Hyperparameters,
        w_k: GossipRound,
        grad_fn,
        multi_gossip_T: int = 1,
):
    """
    One iteration of the accelerated method.

    Args:
        state: The current iterates.
        hp: The hyperparameters.
        w_k: The gossip round of this iteration.
        grad_fn: Called as grad_fn(x_g, k), returns the stacked gradient
            estimate at x_g and the number of oracle calls.
        multi_gossip_T: Mixing repetitions T. With T > 1 every gossip product
            uses I - (I - W)^T.

    Returns:
        The next state, the communication rounds used and the oracle calls
        used.
    """
    assert multi_gossip_T >= 1, \
        f"multi_gossip_T must be >= 1, got {multi_gossip_T}"

    def mix(v):
        if multi_gossip_T == 1:
            return gossip_apply(w_k, v)
        return multi_gossip_apply(w_k, v, multi_gossip_T)

    x, y, z = state.x, state.y, state.z
    x_g = hp.tau1 * x + (1 - hp.tau1) * state.x_f
    y_g = hp.vartheta1 * y + (1 - hp.vartheta1) * state.y_f
    z_g = hp.vartheta1 * z + (1 - hp.vartheta1) * state.z_f
    g, calls = grad_fn(x_g, state.k)
    g = as_stacked(g, *state.shape)

    x_next, y_next = solve_implicit_xy(hp, x, x_g, y, y_g, z_g, g)
    x_f_next = x_g + hp.tau2 * (x_next - x)
    y_f_next = y_g + hp.vartheta2 * (y_next - y)

    dual_sum = y_g + z_g
    gossip_arg = hp.varkappa / hp.nu * dual_sum + state.m
    p1 = mix(gossip_arg)
    p2 = mix(dual_sum)
    z_next = z + hp.varkappa * hp.pi_ * (z_g - z) - p1
    m_next = gossip_arg - p1
    z_f_next = z_g - hp.zeta * p2

    next_state = replace(
        state, x=x_next, x_f=x_f_next, y=y_next, y_f=y_f_next, z=z_next,
        z_f=z_f_next, m=m_next, k=state.k + 1, x_g=x_g, y_g=y_g, z_g=z_g)
    return next_state, multi_gossip_T, calls
