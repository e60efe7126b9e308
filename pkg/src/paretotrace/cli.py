"""Command-line pipeline: sample, estimate, mix, trace, evaluate.

``run`` executes all stages; ``sample``, ``subspace``, ``mix``,
``trace`` and ``front`` execute one stage each against an output
directory, communicating only through the artifact files.  ``run`` is
implemented by chaining the same stage functions, so the two ways of
invoking the pipeline produce byte-identical CSV artifacts.

Exit codes: 0 on success, 2 for configuration errors, 3 for numerical
failures.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np
import scipy

from . import __version__, artifacts
from .coexistence import make_demo_pair, synthetic_oracles
from .domain import (
    ParameterSpace,
    Scenario,
    load_parameter_space,
    sample_uniform,
)
from .errors import ConfigError, ParetoTraceError
from .gradients import (
    CountingObjective,
    ObjectivePair,
    evaluate_objective,
    sample_gradients,
    spectral_from_gradients,
)
from .grassmann import geodesic, mix_subspaces
from .pareto import (
    ParetoTrace,
    evaluate_trace_objectives,
    non_dominated,
    ode_trace,
    project_domain_2d,
    quadratic_trace,
)
from .subspace import (
    Frame,
    fit_ridge,
    select_rank,
    shadow_data,
    to_quadratic,
)

ENV_OUT = "PARETO_TRACE_OUT"
DEFAULT_OUT = "pareto_out"


@dataclass(frozen=True)
class PipelineConfig:
    """Validated run configuration shared by every stage."""

    objectives: str
    out: Path
    space: Path | None = None
    n: int = 1000
    h: float = 1e-6
    seed: int = 0
    degree: int = 2
    rank: int | None = 2
    mix_grid: int = 100
    trace_steps: int = 100
    fiber_k: int = 25
    threads: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError(f"--n must be >= 1, got {self.n}")
        if self.h <= 0:
            raise ConfigError(f"--h must be positive, got {self.h}")
        if self.degree < 1:
            raise ConfigError(f"--degree must be >= 1, got {self.degree}")
        if self.rank is not None and self.rank < 1:
            raise ConfigError(f"--rank must be >= 1 or 'auto', got {self.rank}")
        if self.mix_grid < 2:
            raise ConfigError(f"--mix-grid must be >= 2, got {self.mix_grid}")
        if self.trace_steps < 1:
            raise ConfigError(f"--trace-steps must be >= 1, got {self.trace_steps}")
        if self.fiber_k < 1:
            raise ConfigError(f"--fiber-k must be >= 1, got {self.fiber_k}")
        if self.threads < 1:
            raise ConfigError(f"--threads must be >= 1, got {self.threads}")


@dataclass(frozen=True)
class ObjectiveSet:
    """Resolved objectives plus the box and scenario they run over."""

    pair: ObjectivePair
    space: ParameterSpace
    scenario: Scenario


def resolve_objective_set(config: PipelineConfig) -> ObjectiveSet:
    name = config.objectives
    if name == "demo-coex":
        if config.space is not None:
            try:
                space, scenario = load_parameter_space(config.space)
            except (OSError, ValueError) as exc:
                raise ConfigError(f"cannot load space file: {exc}") from exc
            pair, _, _ = make_demo_pair()
        else:
            pair, space, scenario = make_demo_pair()
        return ObjectiveSet(pair=pair, space=space, scenario=scenario)
    if name.startswith("synthetic:"):
        if config.space is not None:
            raise ConfigError("--space does not apply to synthetic objective sets")
        key = name.split(":", 1)[1]
        catalog = synthetic_oracles()
        if key not in catalog:
            raise ConfigError(
                f"unknown synthetic oracle {key!r}; "
                f"available: {sorted(catalog)}"
            )
        entry = catalog[key]
        return ObjectiveSet(pair=entry.pair, space=entry.space, scenario=entry.scenario)
    raise ConfigError(
        f"unknown objective set {name!r}; use demo-coex or synthetic:<name>"
    )


def _log(message: str):
    print(f"[pareto-trace] {message}", file=sys.stderr)


def stage_sample(config: PipelineConfig) -> dict:
    """Draw samples, evaluate both objectives, estimate all gradients."""
    objset = resolve_objective_set(config)
    space, scenario = objset.space, objset.scenario
    count_l = CountingObjective(objset.pair.objective_l)
    count_w = CountingObjective(objset.pair.objective_w)
    samples = sample_uniform(space, config.n, config.seed)
    values_l = evaluate_objective(count_l, samples, scenario, config.threads)
    values_w = evaluate_objective(count_w, samples, scenario, config.threads)
    grads_l = sample_gradients(
        count_l,
        samples,
        config.h,
        space,
        scenario,
        base_values=values_l,
        threads=config.threads,
        seed=config.seed,
    )
    grads_w = sample_gradients(
        count_w,
        samples,
        config.h,
        space,
        scenario,
        base_values=values_w,
        threads=config.threads,
        seed=config.seed,
    )
    full = replace(samples, values_l=values_l, values_w=values_w)
    artifacts.write_samples_csv(config.out / "samples.csv", full)
    artifacts.write_gradients_csv(config.out / "gradients_L.csv", grads_l.gradients)
    artifacts.write_gradients_csv(config.out / "gradients_W.csv", grads_w.gradients)
    counts = {"L": count_l.calls, "W": count_w.calls}
    _log(
        f"sample: N={config.n}, evaluations per objective: "
        f"L={counts['L']}, W={counts['W']}"
    )
    return {
        "evaluations": counts,
        "objective_names": {"L": objset.pair.name_l, "W": objset.pair.name_w},
    }


def stage_subspace(config: PipelineConfig) -> dict:
    """Eigendecompose the gradient outer-product estimate per objective."""
    objset = resolve_objective_set(config)
    m = objset.space.dim
    out = {}
    for tag in ("L", "W"):
        grads = artifacts.load_gradients_csv(config.out / f"gradients_{tag}.csv", m)
        estimate = spectral_from_gradients(grads, h=config.h, seed=config.seed)
        artifacts.write_spectrum_json(
            config.out / f"spectrum_{tag}.json", tag, estimate
        )
        out[tag] = [float(v) for v in estimate.eigenvalues]
    _log("subspace: spectra written")
    return {"eigenvalues": out}


def stage_mix(config: PipelineConfig) -> dict:
    """Blend the two subspaces along their geodesic by maximin fit quality."""
    objset = resolve_objective_set(config)
    samples = artifacts.load_samples_csv(config.out / "samples.csv", objset.space)
    spectra = {
        tag: artifacts.load_spectrum_json(config.out / f"spectrum_{tag}.json")
        for tag in ("L", "W")
    }
    ranks = {
        tag: select_rank(spectra[tag]["eigenvalues"], override=config.rank)
        for tag in ("L", "W")
    }
    rank = max(ranks.values())
    frames = {
        tag: Frame(spectra[tag]["eigenvectors"][:, :rank]) for tag in ("L", "W")
    }
    path = geodesic(frames["W"], frames["L"])
    mix = mix_subspaces(
        path,
        samples.scaled,
        samples.values_l,
        samples.values_w,
        degree=2,
        grid=config.mix_grid,
    )
    artifacts.write_mix_json(config.out / "mix.json", mix)
    ridge_l = fit_ridge(samples.scaled, samples.values_l, mix.frame, config.degree)
    ridge_w = fit_ridge(samples.scaled, samples.values_w, mix.frame, config.degree)
    artifacts.write_ridge_json(config.out / "ridge_L.json", ridge_l)
    artifacts.write_ridge_json(config.out / "ridge_W.json", ridge_w)
    artifacts.write_shadow_csv(
        config.out / "shadow_L.csv",
        shadow_data(mix.frame, samples.scaled, samples.values_l),
    )
    artifacts.write_shadow_csv(
        config.out / "shadow_W.csv",
        shadow_data(mix.frame, samples.scaled, samples.values_w),
    )
    _log(
        f"mix: s*={mix.s_star:.6f}, R2_L={mix.r2_l:.4f}, R2_W={mix.r2_w:.4f}"
    )
    return {
        "ranks": ranks,
        "rank_used": rank,
        "s_star": float(mix.s_star),
        "r2": {"L": float(mix.r2_l), "W": float(mix.r2_w)},
        "ridge_r2": {"L": float(ridge_l.r_squared), "W": float(ridge_w.r_squared)},
        "geodesic_length": float(path.length),
    }


def _fit_surrogates(config: PipelineConfig, frame: Frame, samples):
    quad_l = to_quadratic(
        fit_ridge(samples.scaled, samples.values_l, frame, 2)
    )
    quad_w = to_quadratic(
        fit_ridge(samples.scaled, samples.values_w, frame, 2)
    )
    return quad_l, quad_w


def stage_trace(config: PipelineConfig) -> dict:
    """Trace the surrogate Pareto curve analytically and check it by ODE."""
    objset = resolve_objective_set(config)
    samples = artifacts.load_samples_csv(config.out / "samples.csv", objset.space)
    mix = artifacts.load_mix_json(config.out / "mix.json")
    frame: Frame = mix["frame"]
    if frame.r != 2:
        raise ConfigError(
            f"trace artifacts are defined for rank 2, got rank {frame.r}"
        )
    quad_l, quad_w = _fit_surrogates(config, frame, samples)
    ts = np.linspace(0.0, 1.0, config.trace_steps + 1)
    trace = quadratic_trace(quad_l, quad_w, ts, frame=frame)
    check = ode_trace(
        quad_l.gradient,
        quad_w.gradient,
        lambda y: quad_l.hessian(),
        lambda y: quad_w.hessian(),
        quad_w.maximizer(),
        steps=config.trace_steps,
        frame=frame,
    )
    gap = float(np.max(np.abs(check.ys - trace.ys)))
    artifacts.write_trace_csv(config.out / "trace.csv", trace)
    artifacts.write_zonotope_csv(
        config.out / "zonotope.csv", project_domain_2d(frame)
    )
    _log(
        f"trace: {trace.n} points, {int(trace.in_domain.sum())} in domain, "
        f"ode gap {gap:.3e}"
    )
    return {
        "ode_vs_closed_form_linf": gap,
        "in_domain_points": int(trace.in_domain.sum()),
        "convexified": {"L": quad_l.convexified, "W": quad_w.convexified},
    }


def stage_front(config: PipelineConfig) -> dict:
    """Evaluate true objectives over trace fibers; filter sampled points."""
    objset = resolve_objective_set(config)
    samples = artifacts.load_samples_csv(config.out / "samples.csv", objset.space)
    mix = artifacts.load_mix_json(config.out / "mix.json")
    frame: Frame = mix["frame"]
    raw = artifacts.load_trace_csv(config.out / "trace.csv")
    trace = ParetoTrace(
        ts=raw["ts"],
        ys=raw["ys"],
        s_l=raw["s_l"],
        s_w=raw["s_w"],
        in_domain=raw["in_domain"],
    )
    count_l = CountingObjective(objset.pair.objective_l)
    count_w = CountingObjective(objset.pair.objective_w)
    counted_pair = ObjectivePair(
        objective_l=count_l,
        objective_w=count_w,
        name_l=objset.pair.name_l,
        name_w=objset.pair.name_w,
    )
    front = evaluate_trace_objectives(
        trace,
        counted_pair,
        frame,
        objset.space,
        objset.scenario,
        k=config.fiber_k,
        seed=config.seed,
    )
    artifacts.write_front_csv(config.out / "front.csv", front)
    nd = non_dominated(np.column_stack([samples.values_l, samples.values_w]))
    artifacts.write_nondominated_csv(config.out / "nondominated.csv", nd)
    _log(
        f"front: {front.ts.size} fiber points, "
        f"{nd.indices.size} non-dominated samples"
    )
    return {
        "fiber_evaluations": {"L": count_l.calls, "W": count_w.calls},
        "nondominated_count": int(nd.indices.size),
    }


STAGES = [
    ("sample", stage_sample),
    ("subspace", stage_subspace),
    ("mix", stage_mix),
    ("trace", stage_trace),
    ("front", stage_front),
]

ARTIFACT_NAMES = [
    "samples.csv",
    "gradients_L.csv",
    "gradients_W.csv",
    "spectrum_L.json",
    "spectrum_W.json",
    "mix.json",
    "ridge_L.json",
    "ridge_W.json",
    "shadow_L.csv",
    "shadow_W.csv",
    "trace.csv",
    "zonotope.csv",
    "front.csv",
    "nondominated.csv",
]


def _manifest_files(out: Path) -> list[dict]:
    entries = []
    for name in ARTIFACT_NAMES:
        path = out / name
        if path.exists():
            entries.append(
                {
                    "name": name,
                    "sha256": artifacts.sha256_of(path),
                    "bytes": path.stat().st_size,
                }
            )
    return entries


def _config_payload(config: PipelineConfig) -> dict:
    payload = asdict(config)
    payload["out"] = str(config.out)
    payload["space"] = str(config.space) if config.space else None
    return payload


def run_pipeline(config: PipelineConfig) -> dict:
    """All stages in order; writes manifest.json, partial on failure."""
    config.out.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    manifest = {
        "config": _config_payload(config),
        "versions": {
            "paretotrace": __version__,
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "stages": {},
    }
    if config.objectives == "demo-coex":
        manifest["model_note"] = (
            "demo coexistence objectives are a synthetic stand-in model; "
            "numbers are illustrative, not validated link-level results"
        )
    try:
        for name, fn in STAGES:
            manifest["stages"][name] = fn(config)
    except Exception as exc:
        manifest["failed_stage"] = name
        manifest["error"] = str(exc)
        manifest["wall_time_s"] = time.perf_counter() - started
        manifest["files"] = _manifest_files(config.out)
        artifacts.write_json(config.out / "manifest.json", manifest)
        raise
    manifest["wall_time_s"] = time.perf_counter() - started
    manifest["files"] = _manifest_files(config.out)
    artifacts.write_json(config.out / "manifest.json", manifest)
    _log(f"run: complete in {manifest['wall_time_s']:.1f}s -> {config.out}")
    return manifest


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pareto-trace",
        description=(
            "Active-subspace discovery and Pareto-front tracing for a pair "
            "of competing objectives over a bounded box."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        "run": "execute every stage",
        "sample": "draw samples and estimate gradients",
        "subspace": "eigendecompose the gradient outer products",
        "mix": "blend the two subspaces along their geodesic",
        "trace": "trace the surrogate Pareto curve",
        "front": "evaluate true objectives over trace fibers",
    }
    for command, description in descriptions.items():
        p = sub.add_parser(command, help=description)
        p.add_argument(
            "--objectives",
            required=True,
            help="objective set: demo-coex or synthetic:<name>",
        )
        p.add_argument("--space", default=None, help="parameter space JSON file")
        p.add_argument("--n", type=int, default=1000, help="number of samples")
        p.add_argument(
            "--h", type=float, default=1e-6, help="finite-difference step"
        )
        p.add_argument("--seed", type=int, default=0, help="random seed")
        p.add_argument(
            "--degree", type=int, default=2, help="reported ridge degree"
        )
        p.add_argument(
            "--rank",
            default="2",
            help="subspace rank, or 'auto' for gap-based selection",
        )
        p.add_argument(
            "--mix-grid", type=int, default=100, help="geodesic grid intervals"
        )
        p.add_argument(
            "--trace-steps", type=int, default=100, help="trace grid intervals"
        )
        p.add_argument(
            "--fiber-k", type=int, default=25, help="fiber samples per point"
        )
        p.add_argument("--threads", type=int, default=1, help="worker threads")
        p.add_argument(
            "--out",
            default=None,
            help=f"output directory (falls back to ${ENV_OUT})",
        )
    return parser


def _config_from_args(args: argparse.Namespace) -> PipelineConfig:
    out = args.out or os.environ.get(ENV_OUT) or DEFAULT_OUT
    rank_raw = str(args.rank).strip().lower()
    if rank_raw == "auto":
        rank = None
    else:
        try:
            rank = int(rank_raw)
        except ValueError:
            raise ConfigError(f"--rank must be an integer or 'auto', got {args.rank!r}")
    return PipelineConfig(
        objectives=args.objectives,
        out=Path(out),
        space=Path(args.space) if args.space else None,
        n=args.n,
        h=args.h,
        seed=args.seed,
        degree=args.degree,
        rank=rank,
        mix_grid=args.mix_grid,
        trace_steps=args.trace_steps,
        fiber_k=args.fiber_k,
        threads=args.threads,
    )


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
        if args.command == "run":
            run_pipeline(config)
        else:
            stage = dict(STAGES)[args.command]
            config.out.mkdir(parents=True, exist_ok=True)
            stage(config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ParetoTraceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
