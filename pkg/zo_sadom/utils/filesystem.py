from os.path import exists
import numpy as np

from zo_sadom.network.graphs import Graph, GraphSequenceSpec, build_graph
from zo_sadom.objectives.logreg import Dataset, parse_libsvm
from zo_sadom.objectives.reference import ReferenceSolution
from zo_sadom.utils.errors import ParseError


def read_libsvm_file(
        path: str,
        d: int,
        max_rows: int = None,
):
    """
    Reads a LIBSVM text file.

    Args:
        path: Path to the file.
        d: The feature dimension.
        max_rows: Keep only the first max_rows samples.

    Returns:
        The Dataset.
    """
    with open(path, "rb") as f:
        if max_rows is None:
            text = f.read()
        else:
            lines = []
            for line in f:
                if len(lines) >= max_rows:
                    break
                if line.strip():
                    lines.append(line)
            text = b"".join(lines)
    return parse_libsvm(text, d)


def write_dataset_cache(
        path: str,
        ds: Dataset,
):
    """
    Writes a data set as raw binary: m and d as little-endian int64, the
    features as row-major little-endian float64 and one int8 label per row.

    Args:
        path: Path to the cache file.
        ds: The data set.
    """
    with open(path, "wb") as f:
        f.write(np.array([ds.m, ds.d], dtype="<i8").tobytes())
        f.write(np.ascontiguousarray(ds.features, dtype="<f8").tobytes())
        f.write(ds.labels.astype("i1").tobytes())


def read_dataset_cache(path: str):
    """
    Reads a data set written by write_dataset_cache.

    Args:
        path: Path to the cache file.

    Returns:
        The Dataset, or None if the file does not exist.
    """
    if not exists(path):
        return None
    with open(path, "rb") as f:
        raw = f.read()
    m, d = np.frombuffer(raw[:16], dtype="<i8")
    m, d = int(m), int(d)
    expected = 16 + 8 * m * d + m
    assert len(raw) == expected, \
        f"{path}: cache has {len(raw)} bytes, expected {expected}"
    features = np.frombuffer(raw[16:16 + 8 * m * d], dtype="<f8")
    labels = np.frombuffer(raw[16 + 8 * m * d:], dtype="i1")
    return Dataset(
        features.reshape(m, d).astype(float), labels.astype(float))


def dump_graph_sequence(
        path: str,
        spec: GraphSequenceSpec,
        num_rounds: int,
):
    """
    Writes the graphs of the first rounds in the format

        n=<n>
        round <q>: <i>-<j>,<i>-<j>,...

    Args:
        path: Path to the text file.
        spec: The graph sequence.
        num_rounds: The number of rounds to write.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"n={spec.n}\n")
        for q in range(num_rounds):
            edges = ",".join(
                f"{i}-{j}" for i, j in build_graph(spec, q).sorted_edges())
            f.write(f"round {q}: {edges}\n")


def read_graph_sequence(path: str):
    """
    Reads a graph sequence dump.

    Args:
        path: Path to the text file.

    Returns:
        The list of Graphs, ordered by round.
    """
    with open(path, "r", encoding="utf-8") as f:
        lines = [x.strip() for x in f.readlines()]
    if not lines or not lines[0].startswith("n="):
        raise ParseError("missing 'n=<n>' header", 1)
    try:
        n = int(lines[0][2:])
    except ValueError as err:
        raise ParseError(f"malformed header '{lines[0]}'", 1) from err
    graphs = []
    for number, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        head, sep, body = line.partition(":")
        if not sep or not head.startswith("round "):
            raise ParseError(f"malformed round line '{line}'", number)
        edges = []
        for token in body.split(","):
            token = token.strip()
            if not token:
                continue
            i, dash, j = token.partition("-")
            if not dash:
                raise ParseError(f"malformed edge '{token}'", number)
            try:
                edges.append((int(i), int(j)))
            except ValueError as err:
                raise ParseError(f"malformed edge '{token}'", number) from err
        graphs.append(Graph(n, frozenset(edges)))
    return graphs


def store_reference(
        path: str,
        ref: ReferenceSolution,
):
    """ Stores a reference solution as a numpy .npz archive. """
    with open(path, "wb") as f:
        np.savez(f, x_star=ref.x_star, f_star=ref.f_star,
                 tolerance=ref.tolerance)


def load_reference(path: str):
    """
    Loads a reference solution stored by store_reference.

    Args:
        path: Path to the archive.

    Returns:
        The ReferenceSolution, or None if the file does not exist.
    """
    if not exists(path):
        return None
    with np.load(path) as data:
        return ReferenceSolution(
            np.array(data["x_star"], dtype=float), float(data["f_star"]),
            float(data["tolerance"]))
