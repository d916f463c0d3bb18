from dataclasses import dataclass
from functools import lru_cache
import math
import warnings
import numpy as np
from scipy.linalg import eigvalsh

from zo_sadom.network.graphs import Graph, GraphSequenceSpec, build_graph, \
    laplacian
from zo_sadom.utils.errors import SingularTopology, DimensionMismatch, Empty
from zo_sadom.utils.rng import keyed_generator, STREAM_PROBE
from zo_sadom.utils.stacked import as_stacked, project, sq_norm

ZERO_EIGENVALUE = 1e-9
MIN_SPECTRAL_GAP = 1e-12


@dataclass(frozen=True, eq=False)
class GossipRound:
    """
    The gossip matrix of one communication round together with the spectral
    data of the Laplacian it was built from.

    Attributes:
        w: The symmetric positive semi-definite n x n gossip matrix.
        lambda_max: The largest Laplacian eigenvalue.
        lambda_min_plus: The smallest positive Laplacian eigenvalue.
        chi_local: lambda_max / lambda_min_plus.
    """
    w: np.ndarray
    lambda_max: float
    lambda_min_plus: float
    chi_local: float

    @property
    def n(self):
        """ The number of nodes. """
        return self.w.shape[0]


def gossip_from_laplacian(lap: np.ndarray):
    """
    Normalizes a Laplacian to the gossip matrix W = L / lambda_max(L).

    Args:
        lap: The Laplacian of a connected graph.

    Returns:
        The GossipRound.
    """
    lap = np.asarray(lap, dtype=float)
    eigenvalues = eigvalsh(lap)
    zero = np.abs(eigenvalues) <= ZERO_EIGENVALUE
    positive = eigenvalues[~zero]
    if np.count_nonzero(zero) != 1 or len(positive) == 0:
        raise SingularTopology(
            f"Laplacian must have exactly one zero eigenvalue, found "
            f"{np.count_nonzero(zero)}")
    lambda_max = float(positive.max())
    lambda_min_plus = float(positive.min())
    if lambda_min_plus < MIN_SPECTRAL_GAP:
        raise SingularTopology(
            f"Smallest positive eigenvalue {lambda_min_plus} below "
            f"{MIN_SPECTRAL_GAP}")
    return GossipRound(
        w=lap / lambda_max,
        lambda_max=lambda_max,
        lambda_min_plus=lambda_min_plus,
        chi_local=lambda_max / lambda_min_plus,
    )


def gossip_apply(
        w: GossipRound,
        v: np.ndarray,
):
    """
    Applies (W kron I_d) to a stacked vector without forming the Kronecker
    product. Row i of the result is sum_j w[i, j] * v[j].

    Args:
        w: The gossip round.
        v: The stacked vector, shape (n, d).

    Returns:
        The mixed stacked vector.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 2 or v.shape[0] != w.n:
        raise DimensionMismatch(
            f"Gossip matrix of size {w.n} cannot act on shape {v.shape}")
    return w.w @ v


def multi_gossip_apply(
        w: GossipRound,
        v: np.ndarray,
        rounds: int,
):
    """
    Applies (I - (I - W)^T) kron I_d with T sequential applications of W.

    Args:
        w: The gossip round.
        v: The stacked vector.
        rounds: The number of applications T >= 1.

    Returns:
        The mixed stacked vector.
    """
    assert rounds >= 1, f"Need at least one gossip round, got {rounds}"
    residual = as_stacked(v, n=w.n).copy()
    out = np.zeros_like(residual)
    for _ in range(rounds):
        mixed = gossip_apply(w, residual)
        out += mixed
        residual -= mixed
    return out


def multi_gossip_rounds(chi: float):
    """ The number of repetitions T = ceil(chi * ln 2) of a multi-gossip step. """
    return max(1, math.ceil(chi * math.log(2)))


def effective_chi(
        chi: float,
        rounds: int,
):
    """
    The condition number of I - (I - W)^T when W has condition number chi.

    Args:
        chi: The condition number of a single round.
        rounds: The number of repetitions T.

    Returns:
        1 / (1 - (1 - 1/chi)^T).
    """
    if chi <= 1:
        return 1.0
    return 1.0 / (1.0 - (1.0 - 1.0 / chi) ** rounds)


def estimate_chi(rounds: list):
    """
    Bounds the network condition number by the maximum over the given rounds.

    Args:
        rounds: A non-empty sequence of GossipRound.

    Returns:
        max chi_local, at least 1.
    """
    rounds = list(rounds)
    if len(rounds) == 0:
        raise Empty("Cannot estimate chi from an empty sequence of rounds")
    return max(1.0, max(r.chi_local for r in rounds))


@lru_cache(maxsize=256)
def gossip_round_for(
        spec: GraphSequenceSpec,
        round_index: int,
):
    """ The GossipRound of a round. Cached because periods repeat the graph. """
    period = round_index // spec.reseed_period
    return gossip_from_laplacian(laplacian(
        build_graph(spec, period * spec.reseed_period)))


def estimate_sequence_chi(
        spec: GraphSequenceSpec,
        warmup_rounds: int = 100,
        safety: float = 1.0,
):
    """
    Estimates chi of a graph sequence from a warm-up sample of
    reseed_period-aligned rounds.

    Args:
        spec: The graph sequence.
        warmup_rounds: The number of distinct periods to sample.
        safety: A multiplicative inflation factor.

    Returns:
        The estimated chi.
    """
    rounds = [
        gossip_round_for(spec, p * spec.reseed_period)
        for p in range(warmup_rounds)
    ]
    return safety * estimate_chi(rounds)


def check_gossip_round(
        gossip: GossipRound,
        graph: Graph,
        samples: int = 1000,
        seed: int = 0,
        d: int = 1,
):
    """
    Checks the gossip matrix contract of a round: symmetry, positive
    semi-definiteness, neighbor-only support, the consensus direction in the
    kernel and contraction on zero block-sum vectors.

    Args:
        gossip: The round to check.
        graph: The graph the round was built from.
        samples: The number of random zero block-sum probes.
        seed: The probe seed.
        d: The block length of the probes.

    Returns:
        1 if all checks pass, 0 otherwise.
    """
    w = gossip.w
    n = graph.n
    if w.shape != (n, n):
        warnings.warn(
            f"Gossip matrix shape {w.shape} does not match n={n}",
            UserWarning)
        return 0
    is_valid = 1
    if np.max(np.abs(w - w.T)) > 1e-12:
        warnings.warn("Gossip matrix is not symmetric", UserWarning)
        is_valid = 0
    if eigvalsh(w).min() < -1e-9:
        warnings.warn("Gossip matrix is not positive semi-definite",
                      UserWarning)
        is_valid = 0
    support = graph.adjacency() + np.eye(n)
    if np.any(w[support == 0] != 0):
        warnings.warn("Gossip matrix has weight on a non-edge", UserWarning)
        is_valid = 0
    if np.max(np.abs(w.sum(axis=1))) > 1e-9:
        warnings.warn("Gossip matrix rows do not sum to zero", UserWarning)
        is_valid = 0
    rate = 1.0 - 1.0 / gossip.chi_local
    rng = keyed_generator(seed, n, STREAM_PROBE)
    for _ in range(samples):
        v = project(rng.standard_normal((n, d)))
        if sq_norm(gossip_apply(gossip, v) - v) > rate * sq_norm(v) + 1e-9:
            warnings.warn(
                f"Gossip round does not contract zero block-sum vectors at "
                f"rate {rate}", UserWarning)
            is_valid = 0
            break
    return is_valid
