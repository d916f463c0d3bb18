from dataclasses import dataclass
from io import BytesIO
import numpy as np
from scipy.special import expit
from sklearn.datasets import load_svmlight_file, make_classification

from zo_sadom.utils.errors import ParseError, IndexOutOfRange, \
    TooFewSamples, DegenerateData

POWER_ITERATIONS = 50
POWER_TOLERANCE = 1e-8


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    A binary classification data set.

    Attributes:
        features: The dense (m, d) feature matrix, zero filled.
        labels: The m labels in {-1, +1}.
    """
    features: np.ndarray
    labels: np.ndarray

    @property
    def m(self):
        """ The number of samples. """
        return self.features.shape[0]

    @property
    def d(self):
        """ The number of features. """
        return self.features.shape[1]


def _locate_parse_error(
        lines: list,
        d: int,
        error: Exception,
):
    """
    Scans LIBSVM lines to find the first offending line of a parser error.

    Args:
        lines: The decoded text lines.
        d: The declared dimension.
        error: The error raised by the bulk parser.

    Returns:
        A ParseError or IndexOutOfRange carrying the line number.
    """
    for number, line in enumerate(lines, start=1):
        tokens = line.split("#", 1)[0].split()
        if not tokens:
            continue
        try:
            float(tokens[0])
        except ValueError:
            return ParseError(f"malformed label '{tokens[0]}'", number)
        for token in tokens[1:]:
            idx, sep, val = token.partition(":")
            try:
                idx = int(idx)
                float(val)
            except ValueError:
                return ParseError(f"malformed token '{token}'", number)
            if not sep:
                return ParseError(f"malformed token '{token}'", number)
            if idx < 1:
                return ParseError(f"feature index {idx} is not 1-based", number)
            if idx > d:
                return IndexOutOfRange(
                    f"feature index {idx} exceeds dimension {d}", number)
    return ParseError(str(error))


def parse_libsvm(
        text: bytes,
        d: int,
):
    """
    Parses LIBSVM text of the form '<label> <idx>:<val> ...' with 1-based
    indices. Labels 1 and +1 map to +1, labels 2 and -1 map to -1.

    Args:
        text: The raw bytes of the file.
        d: The feature dimension.

    Returns:
        The parsed Dataset.
    """
    if isinstance(text, str):
        text = text.encode("utf-8")
    lines = text.decode("utf-8", errors="replace").splitlines()
    if not any(line.split("#", 1)[0].strip() for line in lines):
        return Dataset(np.zeros((0, d)), np.zeros(0))
    try:
        features, raw_labels = load_svmlight_file(
            BytesIO(text), n_features=d, zero_based=False, dtype=np.float64)
    except ValueError as err:
        raise _locate_parse_error(lines, d, err) from err
    labels = np.zeros(len(raw_labels))
    labels[raw_labels == 1] = 1
    labels[(raw_labels == 2) | (raw_labels == -1)] = -1
    if np.any(labels == 0):
        bad = int(np.flatnonzero(labels == 0)[0])
        data_lines = [
            number for number, line in enumerate(lines, start=1)
            if line.split("#", 1)[0].strip()
        ]
        raise ParseError(
            f"label {raw_labels[bad]:g} is not one of 1, 2, -1",
            data_lines[bad])
    return Dataset(np.asarray(features.todense()), labels)


def partition(
        ds: Dataset,
        n: int,
):
    """
    Splits a data set into n contiguous blocks of size floor(m/n) or
    ceil(m/n), larger blocks first.

    Args:
        ds: The data set.
        n: The number of nodes.

    Returns:
        A list of n Datasets.
    """
    if ds.m < n:
        raise TooFewSamples(f"{ds.m} samples cannot be split over {n} nodes")
    blocks = np.array_split(np.arange(ds.m), n)
    return [Dataset(ds.features[b], ds.labels[b]) for b in blocks]


def concat(datasets: list):
    """ Concatenates node data sets back into one. """
    return Dataset(
        np.concatenate([ds.features for ds in datasets], axis=0),
        np.concatenate([ds.labels for ds in datasets]),
    )


def logreg_value_grad(
        node_data: Dataset,
        x: np.ndarray,
        r: float,
        sign: float = 1.0,
):
    """
    Value and gradient of the regularized logistic loss

        f(x) = 1/m sum_j log(1 + exp(s * b_j * a_j^T x)) + r/2 ||x||^2.

    With sign s = +1 the loss is taken literally, s = -1 gives the standard
    formulation.

    Args:
        node_data: The samples of the node.
        x: The point, a d-vector.
        r: The l2 regularizer.
        sign: The sign s in front of the margin.

    Returns:
        The value and the gradient.
    """
    x = np.asarray(x, dtype=float)
    margins = sign * node_data.labels * (node_data.features @ x)
    value = np.mean(np.logaddexp(0.0, margins)) + 0.5 * r * float(x @ x)
    weights = expit(margins) * sign * node_data.labels
    grad = node_data.features.T @ weights / node_data.m + r * x
    return float(value), grad


def logreg_hessian(
        node_data: Dataset,
        x: np.ndarray,
        r: float,
        sign: float = 1.0,
):
    """ Hessian of the regularized logistic loss. Does not depend on the sign. """
    margins = sign * node_data.labels * (node_data.features @ x)
    s = expit(margins)
    a = node_data.features
    return (a.T * (s * (1 - s))) @ a / node_data.m + r * np.eye(node_data.d)


def data_smoothness(ds: Dataset):
    """
    Estimates L_data = lambda_max(A^T A / (4m)) by power iteration.

    Args:
        ds: The data set.

    Returns:
        The estimated largest eigenvalue.
    """
    gram = ds.features.T @ ds.features / (4 * ds.m)
    v = np.ones(ds.d) / np.sqrt(ds.d)
    estimate = 0.0
    for _ in range(POWER_ITERATIONS):
        w = gram @ v
        norm = np.linalg.norm(w)
        if norm == 0:
            return 0.0
        v = w / norm
        new_estimate = float(v @ gram @ v)
        if abs(new_estimate - estimate) <= POWER_TOLERANCE * new_estimate:
            return new_estimate
        estimate = new_estimate
    return estimate


def calibrate_regularizer(
        ds: Dataset,
        kappa_target: float,
):
    """
    Chooses the regularizer r so that (L_data + r) / r equals the target
    condition number.

    Args:
        ds: The pooled data set.
        kappa_target: The condition number, > 1.

    Returns:
        The regularizer r. The problem then has mu = r and L = L_data + r.
    """
    assert kappa_target > 1, f"kappa_target must exceed 1, got {kappa_target}"
    l_data = data_smoothness(ds)
    if l_data <= 0:
        raise DegenerateData("Data Gram matrix has no positive eigenvalue")
    return l_data / (kappa_target - 1)


def synthetic_classification(
        m: int,
        d: int,
        seed: int = 0,
):
    """
    Generates a binary classification set with labels in {-1, +1}.

    Args:
        m: The number of samples.
        d: The number of features.
        seed: The random state.

    Returns:
        The Dataset.
    """
    features, labels = make_classification(
        n_samples=m, n_features=d, n_informative=max(1, d // 2),
        n_redundant=0, n_repeated=0, n_clusters_per_class=1,
        random_state=seed % (2 ** 32))
    return Dataset(features.astype(float), np.where(labels == 1, 1.0, -1.0))
