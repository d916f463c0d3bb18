from dataclasses import dataclass
import numpy as np
from scipy.optimize import minimize

from zo_sadom.objectives.problem import ProblemSpec, pooled_value, \
    pooled_gradient, pooled_hessian
from zo_sadom.utils.errors import NoConvergence

SMOOTH_TOLERANCE = 1e-10
NONSMOOTH_TOLERANCE = 1e-8
NEWTON_STEPS = 50
POLISH_ROUNDS = 5


@dataclass(frozen=True, eq=False)
class ReferenceSolution:
    """
    A high accuracy minimizer of sum_i f_i.

    Attributes:
        x_star: The minimizer, a d-vector.
        f_star: The optimal value.
        tolerance: The achieved gradient norm (smooth kinds) or certified
            duality gap (non-smooth kind).
    """
    x_star: np.ndarray
    f_star: float
    tolerance: float


def _smooth_minimizer(
        spec: ProblemSpec,
        tol: float,
        max_iter: int,
):
    """ Trust-region Newton followed by plain Newton steps. """
    res = minimize(
        lambda x: pooled_value(spec, x),
        np.zeros(spec.d),
        jac=lambda x: pooled_gradient(spec, x),
        hess=lambda x: pooled_hessian(spec, x),
        method="trust-exact",
        options={"gtol": tol, "maxiter": min(max_iter, 10000)},
    )
    x = res.x
    grad_norm = float(np.linalg.norm(pooled_gradient(spec, x)))
    for _ in range(NEWTON_STEPS):
        if grad_norm <= tol:
            break
        step = np.linalg.solve(
            pooled_hessian(spec, x), pooled_gradient(spec, x))
        x = x - step
        grad_norm = float(np.linalg.norm(pooled_gradient(spec, x)))
    if grad_norm > tol:
        raise NoConvergence(
            f"Gradient norm {grad_norm:.3e} above tolerance {tol:.1e}")
    return ReferenceSolution(x, pooled_value(spec, x), grad_norm)


def _nonsmooth_minimizer(
        spec: ProblemSpec,
        tol: float,
        max_iter: int,
):
    """
    Solves the box constrained dual

        min_{|u_j| <= w_j} ||A^T u||^2 / (2 mu_p) + u^T b

    of sum_j w_j |a_j^T x - b_j| + mu_p/2 ||x||^2, with w_j = 1/m_i and
    mu_p = n mu, then polishes the active set and certifies the duality gap.
    """
    a = np.concatenate([p.features for p in spec.per_node_data], axis=0)
    b = np.concatenate([p.targets for p in spec.per_node_data])
    w = np.concatenate([
        np.full(p.m, 1.0 / p.m) for p in spec.per_node_data])
    mu_p = spec.n * spec.mu

    def dual(u):
        atu = a.T @ u
        return float(atu @ atu) / (2 * mu_p) + float(u @ b), \
            a @ atu / mu_p + b

    res = minimize(
        dual, np.zeros(len(b)), jac=True, method="L-BFGS-B",
        bounds=list(zip(-w, w)),
        options={"maxiter": min(max_iter, 100000), "maxfun": 10 ** 6,
                 "ftol": 1e-16, "gtol": 1e-14},
    )
    u = np.clip(res.x, -w, w)
    best_u, best_dual = u, dual(u)[0]
    best_x = -a.T @ u / mu_p
    best_primal = pooled_value(spec, best_x)
    for _ in range(POLISH_ROUNDS):
        if best_primal + best_dual <= tol:
            break
        interior = np.abs(u) < w * (1 - 1e-6)
        signs = np.sign(u)
        rhs = -(a[~interior].T @ (w[~interior] * signs[~interior]))
        a_k = a[interior]
        k = a_k.shape[0]
        kkt = np.block([
            [mu_p * np.eye(spec.d), a_k.T],
            [a_k, np.zeros((k, k))],
        ])
        sol = np.linalg.lstsq(
            kkt, np.concatenate((rhs, b[interior])), rcond=None)[0]
        x = sol[:spec.d]
        u = w * signs
        u[interior] = np.clip(sol[spec.d:], -w[interior], w[interior])
        primal, dual_value = pooled_value(spec, x), dual(u)[0]
        if primal < best_primal:
            best_x, best_primal = x, primal
        if dual_value < best_dual:
            best_u, best_dual = u, dual_value
        u = best_u
    gap = best_primal + best_dual
    if gap > tol:
        raise NoConvergence(
            f"Duality gap {gap:.3e} above tolerance {tol:.1e}")
    return ReferenceSolution(best_x, best_primal, max(gap, 0.0))


def reference_minimizer(
        spec: ProblemSpec,
        tol: float = None,
        max_iter: int = 10 ** 7,
):
    """
    Computes a certified minimizer of sum_i f_i.

    Args:
        spec: The problem.
        tol: The gradient-norm bound (smooth kinds, default 1e-10) or the
            duality-gap bound (non-smooth kind, default 1e-8).
        max_iter: The iteration cap of the inner solver.

    Returns:
        The ReferenceSolution.
    """
    if spec.is_smooth:
        return _smooth_minimizer(
            spec, SMOOTH_TOLERANCE if tol is None else tol, max_iter)
    return _nonsmooth_minimizer(
        spec, NONSMOOTH_TOLERANCE if tol is None else tol, max_iter)
