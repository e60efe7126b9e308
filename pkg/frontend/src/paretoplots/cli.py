"""Command-line renderer: run directory in, figure files plus index out."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import matplotlib.pyplot as plt

from . import figures
from .errors import PlotDataError

FIGURE_KINDS = ("front", "shadow", "mix")

SOURCES = {
    "front": ["trace.csv", "front.csv", "nondominated.csv"],
    "shadow_L": [
        "shadow_L.csv",
        "ridge_L.json",
        "zonotope.csv",
        "trace.csv",
        "nondominated.csv",
    ],
    "shadow_W": [
        "shadow_W.csv",
        "ridge_W.json",
        "zonotope.csv",
        "trace.csv",
        "nondominated.csv",
    ],
    "mix": ["mix.json"],
}


def render_all(run_dir: Path, out_dir: Path, kinds: list[str], dpi: int) -> list[dict]:
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []

    def save(name: str, fig: plt.Figure):
        target = out_dir / f"{name}.png"
        fig.savefig(target, dpi=dpi)
        plt.close(fig)
        entries.append(
            {"name": name, "file": target.name, "sources": SOURCES[name]}
        )

    if "front" in kinds:
        fig, _ = figures.front_figure(run_dir)
        save("front", fig)
    if "shadow" in kinds:
        for tag in ("L", "W"):
            fig, _ = figures.shadow_figure(run_dir, tag)
            save(f"shadow_{tag}", fig)
    if "mix" in kinds:
        fig, _ = figures.mix_figure(run_dir)
        save("mix", fig)
    return entries


def write_gallery(out_dir: Path, run_dir: Path, entries: list[dict]):
    payload = {"run": str(run_dir), "figures": entries}
    with (out_dir / "gallery.json").open("w") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pareto-plot",
        description=(
            "Render figures from the artifact files of a completed "
            "pareto-trace run."
        ),
    )
    parser.add_argument(
        "--run",
        required=True,
        help="run directory containing trace.csv, front.csv, mix.json, ...",
    )
    parser.add_argument(
        "--out",
        default=None,
        help="output directory for figures (default: <run>/figures)",
    )
    parser.add_argument(
        "--figures",
        default="front,shadow,mix",
        help="comma-separated figure kinds to render (front, shadow, mix)",
    )
    parser.add_argument("--dpi", type=int, default=120, help="raster resolution")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    run_dir = Path(args.run)
    out_dir = Path(args.out) if args.out else run_dir / "figures"
    kinds = [k.strip() for k in args.figures.split(",") if k.strip()]
    unknown = [k for k in kinds if k not in FIGURE_KINDS]
    if unknown:
        print(f"error: unknown figure kind(s): {', '.join(unknown)}",
              file=sys.stderr)
        return 2
    if not run_dir.is_dir():
        print(f"error: {run_dir}: run directory not found", file=sys.stderr)
        return 2
    try:
        entries = render_all(run_dir, out_dir, kinds, args.dpi)
    except PlotDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    write_gallery(out_dir, run_dir, entries)
    print(f"wrote {len(entries)} figure(s) to {out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
