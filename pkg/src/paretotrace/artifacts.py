"""Readers and writers for every file the pipeline exchanges.

CSV floats are printed with 17 significant digits so values survive a
write/read round trip bit for bit, which is what makes the stage-wise
command chain reproduce the single-shot run exactly.  JSON files go
through the stdlib encoder, whose repr round-trips doubles as well.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from .domain import ParameterSpace, SampleSet, unscale_from_unit
from .errors import SchemaError
from .subspace import Frame, RidgeModel

FLOAT_FMT = "%.17g"


def fmt(value: float) -> str:
    return FLOAT_FMT % float(value)


def sha256_of(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_json(path: str | Path, payload: dict):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _read_json(path: str | Path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise SchemaError(path, "existing JSON file", "missing file")
    except json.JSONDecodeError as exc:
        raise SchemaError(path, "valid JSON", f"parse error: {exc}")


def _require_keys(path, payload: dict, keys: list[str]):
    missing = [k for k in keys if k not in payload]
    if missing:
        raise SchemaError(path, f"keys {keys}", f"missing {missing}")


def _write_rows(path: str | Path, header: list[str] | None, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        if header is not None:
            writer.writerow(header)
        writer.writerows(rows)


def _read_table(path: str | Path, expected_header: list[str]) -> np.ndarray:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            rows = [row for row in reader if row]
    except FileNotFoundError:
        raise SchemaError(path, "existing CSV file", "missing file")
    if header != expected_header:
        raise SchemaError(path, expected_header, header)
    try:
        return np.array([[float(v) for v in row] for row in rows])
    except ValueError as exc:
        raise SchemaError(path, "numeric rows", f"parse error: {exc}")


# -- samples ----------------------------------------------------------------


def samples_header(m: int) -> list[str]:
    return [f"s{i + 1}" for i in range(m)] + ["value_L", "value_W"]


def write_samples_csv(path: str | Path, samples: SampleSet):
    if samples.values_l is None or samples.values_w is None:
        raise ValueError("samples must carry both objective values")
    rows = (
        [fmt(v) for v in samples.scaled[i]]
        + [fmt(samples.values_l[i]), fmt(samples.values_w[i])]
        for i in range(samples.n)
    )
    _write_rows(path, samples_header(samples.scaled.shape[1]), rows)


def load_samples_csv(path: str | Path, space: ParameterSpace) -> SampleSet:
    data = _read_table(path, samples_header(space.dim))
    if data.size == 0:
        raise SchemaError(path, "at least one sample row", "empty table")
    scaled = data[:, : space.dim]
    return SampleSet(
        scaled=scaled,
        original=unscale_from_unit(scaled, space),
        values_l=data[:, space.dim],
        values_w=data[:, space.dim + 1],
    )


# -- gradients --------------------------------------------------------------


def write_gradients_csv(path: str | Path, gradients: np.ndarray):
    np.savetxt(path, np.atleast_2d(gradients), fmt=FLOAT_FMT, delimiter=",")


def load_gradients_csv(path: str | Path, m: int) -> np.ndarray:
    try:
        data = np.loadtxt(path, delimiter=",", ndmin=2)
    except FileNotFoundError:
        raise SchemaError(path, "existing CSV file", "missing file")
    except ValueError as exc:
        raise SchemaError(path, "numeric matrix", f"parse error: {exc}")
    if data.shape[1] != m:
        raise SchemaError(path, f"{m} columns", f"{data.shape[1]} columns")
    return data


# -- spectrum ---------------------------------------------------------------


def write_spectrum_json(path: str | Path, name: str, estimate):
    write_json(
        path,
        {
            "name": name,
            "eigenvalues": [float(v) for v in estimate.eigenvalues],
            "eigenvectors": [
                [float(v) for v in row] for row in estimate.eigenvectors
            ],
            "N": int(estimate.n_samples),
            "h": float(estimate.h),
            "seed": estimate.seed,
        },
    )


def load_spectrum_json(path: str | Path) -> dict:
    payload = _read_json(path)
    _require_keys(path, payload, ["eigenvalues", "eigenvectors", "N", "h", "seed"])
    payload["eigenvalues"] = np.asarray(payload["eigenvalues"], dtype=float)
    payload["eigenvectors"] = np.asarray(payload["eigenvectors"], dtype=float)
    return payload


# -- ridge ------------------------------------------------------------------


def write_ridge_json(path: str | Path, model: RidgeModel):
    write_json(
        path,
        {
            "frame": [[float(v) for v in row] for row in model.frame.basis],
            "degree": int(model.degree),
            "coefficients": [
                {"exponents": list(map(int, e)), "coefficient": float(c)}
                for e, c in zip(model.exponents, model.coefficients)
            ],
            "r_squared": float(model.r_squared),
        },
    )


def load_ridge_json(path: str | Path) -> RidgeModel:
    payload = _read_json(path)
    _require_keys(path, payload, ["frame", "degree", "coefficients", "r_squared"])
    frame = Frame(np.asarray(payload["frame"], dtype=float))
    exponents = [tuple(term["exponents"]) for term in payload["coefficients"]]
    coefficients = np.array(
        [float(term["coefficient"]) for term in payload["coefficients"]]
    )
    return RidgeModel(
        frame=frame,
        degree=int(payload["degree"]),
        exponents=exponents,
        coefficients=coefficients,
        r_squared=float(payload["r_squared"]),
    )


# -- shadow -----------------------------------------------------------------


def shadow_header(r: int) -> list[str]:
    return [f"y{i + 1}" for i in range(r)] + ["value"]


def write_shadow_csv(path: str | Path, shadow):
    rows = (
        [fmt(v) for v in shadow.y[i]] + [fmt(shadow.values[i])]
        for i in range(shadow.values.size)
    )
    _write_rows(path, shadow_header(shadow.y.shape[1]), rows)


def load_shadow_csv(path: str | Path, r: int) -> tuple[np.ndarray, np.ndarray]:
    data = _read_table(path, shadow_header(r))
    return data[:, :r], data[:, r]


# -- mix --------------------------------------------------------------------


def write_mix_json(path: str | Path, mix):
    write_json(
        path,
        {
            "s_star": float(mix.s_star),
            "r2_L": float(mix.r2_l),
            "r2_W": float(mix.r2_w),
            "frame": [[float(v) for v in row] for row in mix.frame.basis],
            "trace": [[float(v) for v in row] for row in mix.trace],
        },
    )


def load_mix_json(path: str | Path) -> dict:
    payload = _read_json(path)
    _require_keys(path, payload, ["s_star", "r2_L", "r2_W", "frame", "trace"])
    payload["frame"] = Frame(np.asarray(payload["frame"], dtype=float))
    payload["trace"] = np.asarray(payload["trace"], dtype=float)
    return payload


# -- trace ------------------------------------------------------------------


TRACE_HEADER = ["t", "y1", "y2", "in_domain", "sL_surrogate", "sW_surrogate"]


def write_trace_csv(path: str | Path, trace):
    if trace.ys.shape[1] != 2:
        raise ValueError("trace CSV schema is fixed to two active coordinates")
    rows = (
        [
            fmt(trace.ts[i]),
            fmt(trace.ys[i, 0]),
            fmt(trace.ys[i, 1]),
            str(int(trace.in_domain[i])),
            fmt(trace.s_l[i]),
            fmt(trace.s_w[i]),
        ]
        for i in range(trace.n)
    )
    _write_rows(path, TRACE_HEADER, rows)


def load_trace_csv(path: str | Path) -> dict:
    data = _read_table(path, TRACE_HEADER)
    return {
        "ts": data[:, 0],
        "ys": data[:, 1:3],
        "in_domain": data[:, 3] > 0.5,
        "s_l": data[:, 4],
        "s_w": data[:, 5],
    }


# -- front ------------------------------------------------------------------


FRONT_HEADER = ["t", "sL_mean", "sW_mean", "sL_min", "sL_max", "sW_min", "sW_max"]


def write_front_csv(path: str | Path, front):
    rows = (
        [
            fmt(front.ts[i]),
            fmt(front.mean_l[i]),
            fmt(front.mean_w[i]),
            fmt(front.min_l[i]),
            fmt(front.max_l[i]),
            fmt(front.min_w[i]),
            fmt(front.max_w[i]),
        ]
        for i in range(front.ts.size)
    )
    _write_rows(path, FRONT_HEADER, rows)


# -- non-dominated ----------------------------------------------------------


NONDOMINATED_HEADER = ["index", "sL", "sW"]


def write_nondominated_csv(path: str | Path, front_sample):
    rows = (
        [str(int(front_sample.indices[i])), fmt(front_sample.points[i, 0]), fmt(front_sample.points[i, 1])]
        for i in range(front_sample.indices.size)
    )
    _write_rows(path, NONDOMINATED_HEADER, rows)


# -- zonotope ---------------------------------------------------------------


ZONOTOPE_HEADER = ["y1", "y2"]


def write_zonotope_csv(path: str | Path, zonotope):
    rows = ([fmt(v[0]), fmt(v[1])] for v in zonotope.vertices)
    _write_rows(path, ZONOTOPE_HEADER, rows)
