import numpy as np

from zo_sadom.utils.errors import DimensionMismatch


def as_stacked(
        v: np.ndarray,
        n: int = None,
        d: int = None,
):
    """
    Validates a stacked vector. A stacked vector is an element of (R^d)^V and
    is stored as a float array of shape (n, d) where row i is the block of
    node i.

    Args:
        v: The array to check.
        n: The expected number of blocks. Not checked if None.
        d: The expected block length. Not checked if None.

    Returns:
        The input as a float64 array of shape (n, d).
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 2:
        raise DimensionMismatch(
            f"Stacked vector must have shape (n, d), got {v.shape}")
    if n is not None and v.shape[0] != n:
        raise DimensionMismatch(f"Expected {n} blocks, got {v.shape[0]}")
    if d is not None and v.shape[1] != d:
        raise DimensionMismatch(f"Expected block length {d}, got {v.shape[1]}")
    return v


def broadcast(
        x: np.ndarray,
        n: int,
):
    """ Stacks n copies of the d-vector x (an element of the consensus space). """
    return np.tile(np.asarray(x, dtype=float), (n, 1))


def block_mean(v: np.ndarray):
    """ The average of the blocks of a stacked vector. """
    return np.mean(v, axis=0)


def block_sum(v: np.ndarray):
    """ The sum of the blocks of a stacked vector. """
    return np.sum(v, axis=0)


def project(v: np.ndarray):
    """
    Orthogonal projection onto the zero block-sum subspace, i.e. the action of
    P = (I_n - 1 1^T / n) kron I_d.
    """
    return v - block_mean(v)[None, :]


def sq_norm(v: np.ndarray):
    """ Squared Euclidean norm of a stacked vector. """
    return float(np.sum(np.square(v)))


def p_norm_sq(v: np.ndarray):
    """ The P-seminorm <v, P v>. """
    return sq_norm(project(v))


def consensus_error(x: np.ndarray):
    """
    Computes the disagreement of a stacked vector, sum_i ||x_i - x_bar||^2.

    Args:
        x: The stacked vector, shape (n, d).

    Returns:
        The consensus error as a float.
    """
    return p_norm_sq(as_stacked(x))
