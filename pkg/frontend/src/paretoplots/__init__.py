"""Figure rendering for pareto-trace run artifacts."""

from .errors import PlotDataError
from .figures import (
    front_figure,
    front_overlay_data,
    mix_figure,
    mix_overlay_data,
    render_front,
    render_mix,
    render_shadow,
    shadow_figure,
    shadow_overlay_data,
)
from .reader import (
    evaluate_ridge,
    load_front,
    load_mix,
    load_nondominated,
    load_objective_names,
    load_ridge,
    load_shadow,
    load_trace,
    load_zonotope,
)

__version__ = "0.1.0"

__all__ = [
    "PlotDataError",
    "front_figure",
    "front_overlay_data",
    "mix_figure",
    "mix_overlay_data",
    "render_front",
    "render_mix",
    "render_shadow",
    "shadow_figure",
    "shadow_overlay_data",
    "evaluate_ridge",
    "load_front",
    "load_mix",
    "load_nondominated",
    "load_objective_names",
    "load_ridge",
    "load_shadow",
    "load_trace",
    "load_zonotope",
    "__version__",
]
