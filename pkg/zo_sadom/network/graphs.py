from dataclasses import dataclass, field
import numpy as np
from scipy.sparse.csgraph import connected_components, laplacian as csgraph_laplacian
from scipy.spatial.distance import pdist, squareform

from zo_sadom.utils.errors import BadSpec, Disconnected
from zo_sadom.utils.rng import keyed_generator, STREAM_GRAPH

GRAPH_KINDS = [
    "geometric", "ring_star_alternating", "ring", "star", "complete",
    "fixed_list"
]
MAX_REGENERATIONS = 100


@dataclass(frozen=True)
class Graph:
    """
    An undirected simple graph on the nodes 0, ..., n - 1.

    Attributes:
        n: The number of nodes.
        edges: The unordered node pairs, stored as sorted (i, j) with i < j.
    """
    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 1:
            raise BadSpec(f"Graph needs at least one node, got n={self.n}")
        normalized = set()
        for i, j in self.edges:
            i, j = int(i), int(j)
            if i == j:
                raise BadSpec(f"Self-loop on node {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise BadSpec(f"Edge ({i}, {j}) outside [0, {self.n})")
            normalized.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(normalized))

    def adjacency(self):
        """ The dense 0/1 adjacency matrix. """
        a = np.zeros((self.n, self.n))
        for i, j in self.edges:
            a[i, j] = 1
            a[j, i] = 1
        return a

    def is_connected(self):
        """ True if the graph has a single connected component. """
        num, _ = connected_components(self.adjacency(), directed=False)
        return num == 1

    def sorted_edges(self):
        """ The edges in lexicographic order. """
        return sorted(self.edges)


@dataclass(frozen=True)
class GraphSequenceSpec:
    """
    Describes a time-varying network.

    Attributes:
        kind: One of GRAPH_KINDS.
        n: The number of nodes.
        radius: The connection radius of geometric graphs (unit square).
        reseed_period: Rounds between two regenerations of the graph.
        seed: The seed of the counter-based generator.
        edge_lists: Edge lists cycled through by the fixed_list kind. A tuple
            of tuples of (i, j) pairs.
    """
    kind: str = "geometric"
    n: int = 20
    radius: float = 0.5
    reseed_period: int = 1
    seed: int = 0
    edge_lists: tuple = ()

    def __post_init__(self):
        if self.kind not in GRAPH_KINDS:
            raise BadSpec(
                f"Unknown graph kind '{self.kind}'. Existing kinds: "
                f"{GRAPH_KINDS}")
        if self.n < 2:
            raise BadSpec(f"Graph sequences need n >= 2, got n={self.n}")
        if self.reseed_period < 1:
            raise BadSpec(
                f"reseed_period must be >= 1, got {self.reseed_period}")
        if self.kind == "geometric" and self.radius <= 0:
            raise BadSpec(f"radius must be positive, got {self.radius}")
        if self.kind == "fixed_list" and len(self.edge_lists) == 0:
            raise BadSpec("fixed_list needs at least one edge list")
        object.__setattr__(self, "edge_lists", tuple(
            tuple((int(i), int(j)) for i, j in edges)
            for edges in self.edge_lists))


def ring_graph(n: int):
    """ The cycle 0 - 1 - ... - (n - 1) - 0. For n = 2 a single edge. """
    return Graph(n, frozenset((i, (i + 1) % n) for i in range(n)))


def star_graph(n: int):
    """ The star with hub node 0. """
    return Graph(n, frozenset((0, i) for i in range(1, n)))


def complete_graph(n: int):
    """ The complete graph K_n. """
    return Graph(n, frozenset(
        (i, j) for i in range(n) for j in range(i + 1, n)))


def geometric_graph(
        n: int,
        radius: float,
        seed: int,
        period: int,
        attempt: int = 0,
):
    """
    Samples a random geometric graph: n points uniform in the unit square,
    connected when their distance is at most the radius.

    Args:
        n: The number of nodes.
        radius: The connection radius.
        seed: The sequence seed.
        period: The regeneration period index (part of the key).
        attempt: The regeneration sub-seed (part of the key).

    Returns:
        The sampled Graph (not necessarily connected).
    """
    rng = keyed_generator(seed, period, attempt, STREAM_GRAPH)
    points = rng.uniform(0.0, 1.0, size=(n, 2))
    close = squareform(pdist(points)) <= radius
    rows, cols = np.nonzero(np.triu(close, k=1))
    return Graph(n, frozenset(zip(rows.tolist(), cols.tolist())))


def build_graph(
        spec: GraphSequenceSpec,
        round_index: int,
):
    """
    Builds the communication graph of a round. The result is a pure function
    of (spec, round_index).

    Args:
        spec: The graph sequence specification.
        round_index: The communication round q >= 0.

    Returns:
        A connected Graph.
    """
    if round_index < 0:
        raise BadSpec(f"round_index must be >= 0, got {round_index}")
    period = round_index // spec.reseed_period
    if spec.kind == "geometric":
        for attempt in range(MAX_REGENERATIONS):
            graph = geometric_graph(
                spec.n, spec.radius, spec.seed, period, attempt)
            if graph.is_connected():
                return graph
        raise Disconnected(
            f"No connected geometric graph with n={spec.n}, "
            f"radius={spec.radius} after {MAX_REGENERATIONS} attempts")
    if spec.kind == "ring":
        graph = ring_graph(spec.n)
    elif spec.kind == "star":
        graph = star_graph(spec.n)
    elif spec.kind == "complete":
        graph = complete_graph(spec.n)
    elif spec.kind == "ring_star_alternating":
        graph = ring_graph(spec.n) if period % 2 == 0 else star_graph(spec.n)
    else:
        edges = spec.edge_lists[period % len(spec.edge_lists)]
        graph = Graph(spec.n, frozenset(edges))
    if not graph.is_connected():
        raise Disconnected(f"Graph of round {round_index} is not connected")
    return graph


def laplacian(g: Graph):
    """
    Computes the graph Laplacian L = D - A.

    Args:
        g: A connected graph.

    Returns:
        The dense n x n Laplacian.
    """
    return np.asarray(csgraph_laplacian(g.adjacency()), dtype=float)
