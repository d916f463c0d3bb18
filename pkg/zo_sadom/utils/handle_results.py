import json
import pandas as pd

ESTIMATOR_COLUMNS = [
    "scheme", "d", "gamma", "delta_tilde", "second_moment", "bound", "bias",
    "bias_bound"
]


def print_results(results):
    """
    Prints results in a nice table.

    Args:
        results: A dictionary of scalars or a list of (name, dictionary)
            pairs.
    """

    def print_line(metrics: dict):
        """
        Prints a line of the table.

        Args:
            metrics: A dictionary with the entries of the line.
        """
        print(*[f"{k}: {_format(v)},\t" for k, v in metrics.items()])

    if isinstance(results, dict):
        print_line(results)
    elif isinstance(results, list):
        for res in results:
            print(res[0], end=":\t\t")
            print_line(res[1])


def _format(value):
    if value is None:
        return "N/A"
    if isinstance(value, (bool, str)):
        return str(value)
    if isinstance(value, int):
        return str(value)
    return f"{float(value):.5}"


def write_frame(
        path: str,
        frame: pd.DataFrame,
        comments: list = None,
):
    """
    Writes a frame as CSV with 17 significant digits and LF line endings,
    preceded by optional '# ' comment lines.

    Args:
        path: The path to the csv file.
        frame: The data.
        comments: Lines written above the header.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for comment in comments or []:
            f.write(f"# {comment}\n")
        frame.to_csv(
            f, index=False, float_format="%.17g", lineterminator="\n")


def export_csv(
        log,
        path: str,
):
    """
    Stores a MetricsLog as CSV with the header
    iter,comm,oracle,seconds,dist_sq,gap,criterion,consensus,psi_x,psi_yz.

    Args:
        log: The MetricsLog.
        path: The path to the csv file.
    """
    write_frame(path, log.to_frame(), log.comments)


def read_csv(path: str):
    """ Reads a CSV written by write_frame, skipping comment lines. """
    return pd.read_csv(path, comment="#", float_precision="round_trip")


def estimator_row(
        cfg,
        d: int,
        stats,
        bound: float,
        bias_bound: float,
):
    """
    One EstimatorStats row of the verification CSV.

    Returns:
        A dict with the keys of ESTIMATOR_COLUMNS.
    """
    return {
        "scheme": cfg.scheme,
        "d": d,
        "gamma": cfg.gamma,
        "delta_tilde": cfg.noise_bound,
        "second_moment": stats.second_moment,
        "bound": bound,
        "bias": stats.bias_norm,
        "bias_bound": bias_bound,
    }


def export_estimator_stats(
        rows: list,
        path: str,
):
    """ Stores estimator rows as CSV with the columns ESTIMATOR_COLUMNS. """
    write_frame(path, pd.DataFrame(rows, columns=ESTIMATOR_COLUMNS))


def store_summary(
        path: str,
        summary,
):
    """
    Stores a JSON summary.

    Args:
        path: The path to the json file.
        summary: A JSON serializable object.
    """
    if not path.endswith(".json"):
        path += ".json"
    with open(path, "w", encoding="utf-8") as f:
        json.dump(summary, f, indent=2)
