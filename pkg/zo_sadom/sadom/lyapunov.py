from dataclasses import dataclass
import numpy as np

from zo_sadom.objectives.problem import ProblemSpec, node_values, \
    node_gradients, pooled_value
from zo_sadom.objectives.reference import ReferenceSolution
from zo_sadom.sadom.hyperparameters import Hyperparameters
from zo_sadom.sadom.step import SadomState
from zo_sadom.utils.errors import NoReference
from zo_sadom.utils.stacked import broadcast, block_mean, project, sq_norm, \
    p_norm_sq


@dataclass(frozen=True, eq=False)
class LyapunovSnapshot:
    """
    The two potentials of a state.

    Attributes:
        psi_x: The primal potential.
        psi_yz: The dual potential.
        z_hat: z - P m.
        bregman: The Bregman distance D_F(x_f, x*).
    """
    psi_x: float
    psi_yz: float
    z_hat: np.ndarray
    bregman: float

    @property
    def total(self):
        return self.psi_x + self.psi_yz


def saddle_point(
        spec: ProblemSpec,
        ref: ReferenceSolution,
        nu: float,
):
    """
    The stacked optimal triple: x* on every node, y* = grad F(x*) - nu x*
    and z* = P(-y* - nu x*).

    Args:
        spec: The problem.
        ref: The reference minimizer.
        nu: The splitting constant.

    Returns:
        The stacked x*, y* and z*.
    """
    if ref is None:
        raise NoReference("The saddle point needs a reference solution")
    x_star = broadcast(ref.x_star, spec.n)
    y_star = node_gradients(spec, x_star) - nu * x_star
    z_star = project(-y_star - nu * x_star)
    return x_star, y_star, z_star


def bregman_distance(
        spec: ProblemSpec,
        x: np.ndarray,
        x_star: np.ndarray,
):
    """ D_F(x, x*) = F(x) - F(x*) - <grad F(x*), x - x*> on stacked vectors. """
    return float(
        np.sum(node_values(spec, x)) - np.sum(node_values(spec, x_star)) -
        np.sum(node_gradients(spec, x_star) * (x - x_star)))


def lyapunov(
        state: SadomState,
        hp: Hyperparameters,
        ref: ReferenceSolution,
        spec: ProblemSpec,
):
    """
    Evaluates

        psi_x  = (1/eta + alpha) ||x - x*||^2
                 + 2/tau2 (D_F(x_f, x*) - nu/2 ||x_f - x*||^2)
        psi_yz = (1/theta + beta/2) ||y - y*||^2 + beta/(2 vartheta2) ||y_f - y*||^2
                 + 1/varkappa ||z_hat - z*||^2 + 4/(3 varkappa) ||m||_P^2
                 + 1/(nu vartheta2) ||y_f + z_f - (y* + z*)||^2

    with z_hat = z - P m.

    Args:
        state: The iterates.
        hp: The hyperparameters.
        ref: The reference solution.
        spec: The problem.

    Returns:
        The LyapunovSnapshot.
    """
    if ref is None:
        raise NoReference("Lyapunov monitoring needs a reference solution")
    x_star, y_star, z_star = saddle_point(spec, ref, hp.nu)
    bregman = bregman_distance(spec, state.x_f, x_star)
    psi_x = (1 / hp.eta + hp.alpha) * sq_norm(state.x - x_star) + \
        2 / hp.tau2 * (bregman - hp.nu / 2 * sq_norm(state.x_f - x_star))
    z_hat = state.z - project(state.m)
    psi_yz = (1 / hp.theta + hp.beta / 2) * sq_norm(state.y - y_star) + \
        hp.beta / (2 * hp.vartheta2) * sq_norm(state.y_f - y_star) + \
        sq_norm(z_hat - z_star) / hp.varkappa + \
        4 / (3 * hp.varkappa) * p_norm_sq(state.m) + \
        sq_norm(state.y_f + state.z_f - y_star - z_star) / \
        (hp.nu * hp.vartheta2)
    return LyapunovSnapshot(
        psi_x=float(psi_x), psi_yz=float(psi_yz), z_hat=z_hat,
        bregman=bregman)


def theorem_criterion(
        spec: ProblemSpec,
        ref: ReferenceSolution,
        x: np.ndarray,
        x_f: np.ndarray,
):
    """
    The accuracy criterion on block means

        mu/2 ||x_bar - x*||^2 + F(x_f_bar) - F* - mu/4 ||x_f_bar - x*||^2

    with F = sum_i f_i.

    Args:
        spec: The problem.
        ref: The reference solution.
        x: The stacked x.
        x_f: The stacked x_f.

    Returns:
        The criterion value.
    """
    if ref is None:
        raise NoReference("The criterion needs a reference solution")
    x_bar, x_f_bar = block_mean(x), block_mean(x_f)
    dist = float(np.sum(np.square(x_bar - ref.x_star)))
    dist_f = float(np.sum(np.square(x_f_bar - ref.x_star)))
    gap = pooled_value(spec, x_f_bar) - ref.f_star
    return spec.mu / 2 * dist + gap - spec.mu / 4 * dist_f
