"""The three figure kinds rendered from a completed run directory.

- objective-space figure: the surrogate trade-off curve from the trace,
  the fiber-evaluated true-objective curve with spread bars, and the
  non-dominated raw samples;
- shadow figure (one per objective): samples in active coordinates
  colored by objective value, ridge-model contours, the projected
  domain boundary, and the trace path;
- blend figure: the two fit-quality curves along the subspace geodesic
  and the chosen blend point.

Each figure kind has a data-preparation step that returns plain arrays
and a render step that turns them into a matplotlib figure, so tests
can assert on exactly what would be drawn before any drawing happens.
Missing overlay layers (an empty non-dominated set, a fully
out-of-domain trace) produce a warning and are skipped, never an error.
"""

from __future__ import annotations

import warnings
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import reader
from .errors import PlotDataError


def front_overlay_data(run_dir: str | Path) -> dict:
    """Everything the objective-space figure draws, as plain arrays."""
    return {
        "trace": reader.load_trace(run_dir),
        "front": reader.load_front(run_dir),
        "nondominated": reader.load_nondominated(run_dir),
        "names": reader.load_objective_names(run_dir),
    }


def render_front(data: dict) -> plt.Figure:
    trace = data["trace"]
    front = data["front"]
    nd = data["nondominated"]
    names = data["names"]
    fig, ax = plt.subplots(figsize=(6.4, 5.2))

    ax.plot(
        trace["sL_surrogate"],
        trace["sW_surrogate"],
        linestyle=":",
        color="tab:gray",
        linewidth=1.0,
        label="surrogate trace",
    )
    mask = trace["in_domain"]
    if mask.any():
        ax.plot(
            trace["sL_surrogate"][mask],
            trace["sW_surrogate"][mask],
            color="tab:blue",
            linewidth=2.0,
            label="surrogate trace (in domain)",
        )
    else:
        warnings.warn(
            "trace has no in-domain points; skipping the in-domain overlay"
        )

    if front["t"].size:
        ax.errorbar(
            front["sL_mean"],
            front["sW_mean"],
            xerr=[
                front["sL_mean"] - front["sL_min"],
                front["sL_max"] - front["sL_mean"],
            ],
            yerr=[
                front["sW_mean"] - front["sW_min"],
                front["sW_max"] - front["sW_mean"],
            ],
            fmt="o-",
            color="tab:orange",
            markersize=3.5,
            linewidth=1.5,
            elinewidth=0.8,
            capsize=2.0,
            label="true objectives over fibers",
        )
    else:
        warnings.warn("front curve is empty; skipping the fiber overlay")

    if nd["index"].size:
        ax.scatter(
            nd["sL"],
            nd["sW"],
            marker="x",
            s=30,
            color="tab:green",
            label="non-dominated samples",
        )
    else:
        warnings.warn("no non-dominated samples; skipping the sample overlay")

    ax.set_xlabel(names["L"])
    ax.set_ylabel(names["W"])
    ax.set_title("Objective space: surrogate trace vs. true objectives")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return fig


def front_figure(run_dir: str | Path) -> tuple[plt.Figure, dict]:
    data = front_overlay_data(run_dir)
    return render_front(data), data


def shadow_overlay_data(run_dir: str | Path, tag: str) -> dict:
    """Everything one shadow figure draws, as plain arrays."""
    if tag not in ("L", "W"):
        raise ValueError(f"tag must be 'L' or 'W', got {tag!r}")
    shadow = reader.load_shadow(run_dir, tag)
    nd = reader.load_nondominated(run_dir)
    n_rows = shadow["y1"].size
    if nd["index"].size and (nd["index"].min() < 0 or nd["index"].max() >= n_rows):
        raise PlotDataError(
            Path(run_dir) / "nondominated.csv",
            f"index {int(nd['index'].max())} out of range for a shadow table "
            f"with {n_rows} rows",
            column="index",
        )
    return {
        "tag": tag,
        "shadow": shadow,
        "ridge": reader.load_ridge(run_dir, tag),
        "zonotope": reader.load_zonotope(run_dir),
        "trace": reader.load_trace(run_dir),
        "nondominated": nd,
        "names": reader.load_objective_names(run_dir),
    }


def render_shadow(data: dict) -> plt.Figure:
    shadow = data["shadow"]
    zono = data["zonotope"]
    trace = data["trace"]
    nd = data["nondominated"]
    label = data["names"][data["tag"]]
    fig, ax = plt.subplots(figsize=(6.4, 5.2))

    scatter = ax.scatter(
        shadow["y1"],
        shadow["y2"],
        c=shadow["value"],
        s=8,
        cmap="viridis",
        alpha=0.75,
    )
    fig.colorbar(scatter, ax=ax, label=label)

    if nd["index"].size:
        ax.scatter(
            shadow["y1"][nd["index"]],
            shadow["y2"][nd["index"]],
            facecolors="none",
            edgecolors="tab:red",
            s=40,
            linewidths=1.0,
            label="non-dominated samples",
        )
    else:
        warnings.warn("no non-dominated samples; skipping the highlight ring")

    if zono.shape[0] >= 3:
        ring = np.vstack([zono, zono[:1]])
        ax.plot(ring[:, 0], ring[:, 1], color="black", linewidth=1.2,
                label="projected domain")
    else:
        warnings.warn("projected domain has fewer than 3 vertices; skipping")

    pad = 0.05
    lo1, hi1 = shadow["y1"].min(), shadow["y1"].max()
    lo2, hi2 = shadow["y2"].min(), shadow["y2"].max()
    g1 = np.linspace(lo1 - pad, hi1 + pad, 80)
    g2 = np.linspace(lo2 - pad, hi2 + pad, 80)
    mesh1, mesh2 = np.meshgrid(g1, g2)
    surface = reader.evaluate_ridge(data["ridge"], mesh1, mesh2)
    contours = ax.contour(
        mesh1, mesh2, surface, levels=8, colors="tab:gray",
        linewidths=0.7, alpha=0.8,
    )
    ax.clabel(contours, inline=True, fontsize=6, fmt="%.3g")

    ax.plot(trace["y1"], trace["y2"], color="tab:red", linewidth=1.6,
            label="trace path")

    ax.set_xlabel("y1")
    ax.set_ylabel("y2")
    r2 = data["ridge"]["r_squared"]
    ax.set_title(f"Shadow of {label} (ridge fit R² = {r2:.3f})")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return fig


def shadow_figure(run_dir: str | Path, tag: str) -> tuple[plt.Figure, dict]:
    data = shadow_overlay_data(run_dir, tag)
    return render_shadow(data), data


def mix_overlay_data(run_dir: str | Path) -> dict:
    return {"mix": reader.load_mix(run_dir), "names": reader.load_objective_names(run_dir)}


def render_mix(data: dict) -> plt.Figure:
    mix = data["mix"]
    names = data["names"]
    trace = mix["trace"]
    order = np.argsort(trace[:, 0])
    s, r2_l, r2_w = trace[order, 0], trace[order, 1], trace[order, 2]
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    ax.plot(s, r2_l, label=f"fit of {names['L']}", color="tab:blue")
    ax.plot(s, r2_w, label=f"fit of {names['W']}", color="tab:orange")
    ax.plot(s, np.minimum(r2_l, r2_w), label="worse of the two",
            color="black", linewidth=1.0, linestyle="--")
    ax.axvline(mix["s_star"], color="tab:red", linewidth=1.2,
               label=f"chosen blend s* = {mix['s_star']:.3f}")
    ax.set_xlabel("position s along the subspace geodesic")
    ax.set_ylabel("R² of the rank-2 quadratic fit")
    ax.set_title("Subspace blending: fit quality along the geodesic")
    ax.set_xlim(0.0, 1.0)
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return fig


def mix_figure(run_dir: str | Path) -> tuple[plt.Figure, dict]:
    data = mix_overlay_data(run_dir)
    return render_mix(data), data
