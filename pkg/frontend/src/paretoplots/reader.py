"""Readers for the artifact files a pareto-trace run leaves behind.

This package talks to the tracing pipeline only through these files;
nothing here imports the tracer.  Every reader validates shape and
header and raises :class:`PlotDataError` naming the file and column on
any mismatch.

Artifact layout consumed from a run directory:

- ``trace.csv``          t, y1, y2, in_domain, sL_surrogate, sW_surrogate
- ``front.csv``          t, sL_mean, sW_mean, sL_min, sL_max, sW_min, sW_max
- ``nondominated.csv``   index, sL, sW
- ``zonotope.csv``       y1, y2 (polygon vertices, counter-clockwise)
- ``shadow_L.csv`` / ``shadow_W.csv``   y1, y2, value
- ``ridge_L.json`` / ``ridge_W.json``   polynomial terms with exponents
- ``mix.json``           blend trace [s, r2_L, r2_W] and the winner s*
- ``manifest.json``      optional run metadata (objective display names)
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import PlotDataError

TRACE_HEADER = ["t", "y1", "y2", "in_domain", "sL_surrogate", "sW_surrogate"]
FRONT_HEADER = ["t", "sL_mean", "sW_mean", "sL_min", "sL_max", "sW_min", "sW_max"]
NONDOMINATED_HEADER = ["index", "sL", "sW"]
ZONOTOPE_HEADER = ["y1", "y2"]
SHADOW_HEADER = ["y1", "y2", "value"]


def read_csv_columns(path: str | Path, expected_header: list[str]) -> dict:
    """CSV file as a dict of float columns, header checked exactly."""
    path = Path(path)
    if not path.exists():
        raise PlotDataError(path, "file not found")
    with path.open(newline="") as handle:
        rows = list(csv.reader(handle))
    if not rows:
        raise PlotDataError(path, "file is empty, expected a header row")
    header = rows[0]
    for i, name in enumerate(expected_header):
        found = header[i] if i < len(header) else "<missing>"
        if found != name:
            raise PlotDataError(
                path, f"expected column '{name}' at position {i}, found '{found}'",
                column=name,
            )
    if len(header) != len(expected_header):
        raise PlotDataError(
            path,
            f"expected {len(expected_header)} columns, found {len(header)}",
        )
    data = np.empty((len(rows) - 1, len(header)))
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise PlotDataError(path, f"row {r} has {len(row)} cells")
        for c, cell in enumerate(row):
            try:
                data[r - 2, c] = float(cell)
            except ValueError:
                raise PlotDataError(
                    path, f"row {r} is not numeric: '{cell}'", column=header[c]
                )
    return {name: data[:, i] for i, name in enumerate(expected_header)}


def read_json_payload(path: str | Path, required_keys: list[str]) -> dict:
    path = Path(path)
    if not path.exists():
        raise PlotDataError(path, "file not found")
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise PlotDataError(path, f"invalid JSON: {exc}")
    if not isinstance(payload, dict):
        raise PlotDataError(path, "expected a JSON object")
    for key in required_keys:
        if key not in payload:
            raise PlotDataError(path, "missing key", column=key)
    return payload


def load_trace(run_dir: str | Path) -> dict:
    cols = read_csv_columns(Path(run_dir) / "trace.csv", TRACE_HEADER)
    cols["in_domain"] = cols["in_domain"] > 0.5
    return cols


def load_front(run_dir: str | Path) -> dict:
    return read_csv_columns(Path(run_dir) / "front.csv", FRONT_HEADER)


def load_nondominated(run_dir: str | Path) -> dict:
    path = Path(run_dir) / "nondominated.csv"
    cols = read_csv_columns(path, NONDOMINATED_HEADER)
    indices = cols["index"]
    if indices.size and np.max(np.abs(indices - np.round(indices))) > 0:
        raise PlotDataError(path, "indices must be integers", column="index")
    cols["index"] = indices.astype(int)
    return cols


def load_zonotope(run_dir: str | Path) -> np.ndarray:
    cols = read_csv_columns(Path(run_dir) / "zonotope.csv", ZONOTOPE_HEADER)
    return np.column_stack([cols["y1"], cols["y2"]])


def load_shadow(run_dir: str | Path, tag: str) -> dict:
    return read_csv_columns(Path(run_dir) / f"shadow_{tag}.csv", SHADOW_HEADER)


def load_ridge(run_dir: str | Path, tag: str) -> dict:
    """Ridge polynomial as exponent/coefficient term pairs over (y1, y2)."""
    path = Path(run_dir) / f"ridge_{tag}.json"
    payload = read_json_payload(path, ["degree", "coefficients", "r_squared"])
    terms = []
    for term in payload["coefficients"]:
        if "exponents" not in term or "coefficient" not in term:
            raise PlotDataError(path, "term missing exponents/coefficient",
                                column="coefficients")
        exps = term["exponents"]
        if len(exps) != 2:
            raise PlotDataError(
                path,
                f"plots need rank-2 models, got exponents of length {len(exps)}",
                column="coefficients",
            )
        terms.append((int(exps[0]), int(exps[1]), float(term["coefficient"])))
    return {
        "terms": terms,
        "degree": int(payload["degree"]),
        "r_squared": float(payload["r_squared"]),
    }


def evaluate_ridge(ridge: dict, y1: np.ndarray, y2: np.ndarray) -> np.ndarray:
    """Evaluate the exported polynomial on a grid of active coordinates."""
    total = np.zeros(np.broadcast(y1, y2).shape)
    for e1, e2, coef in ridge["terms"]:
        total = total + coef * np.asarray(y1) ** e1 * np.asarray(y2) ** e2
    return total


def load_mix(run_dir: str | Path) -> dict:
    path = Path(run_dir) / "mix.json"
    payload = read_json_payload(path, ["s_star", "r2_L", "r2_W", "trace"])
    trace = np.asarray(payload["trace"], dtype=float)
    if trace.ndim != 2 or trace.shape[1] != 3:
        raise PlotDataError(path, "blend trace must have rows [s, r2_L, r2_W]",
                            column="trace")
    return {
        "s_star": float(payload["s_star"]),
        "r2_L": float(payload["r2_L"]),
        "r2_W": float(payload["r2_W"]),
        "trace": trace,
    }


def load_objective_names(run_dir: str | Path) -> dict:
    """Display names from the manifest; neutral defaults when absent."""
    path = Path(run_dir) / "manifest.json"
    names = {"L": "S_L", "W": "S_W"}
    if not path.exists():
        return names
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError:
        return names
    found = (
        payload.get("stages", {}).get("sample", {}).get("objective_names", {})
    )
    for tag in ("L", "W"):
        if isinstance(found.get(tag), str):
            names[tag] = f"S_{found[tag]}"
    return names
