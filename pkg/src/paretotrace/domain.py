"""Parameter box, fixed scenario, and log-affine scaling onto [-1, 1]^m.

Every parameter here is positive and many span several orders of
magnitude, so all sampling and differentiation happens in scaled
coordinates

    theta_tilde = M ln(theta) + b,

with M diagonal, M_ii = 2 / (ln u_i - ln l_i) and b = -M mu where
mu_i = (ln l_i + ln u_i) / 2.  The box [l, u]^m maps exactly onto the
centered cube [-1, 1]^m and the geometric midpoint of each range lands
at the origin.  The inverse map is theta = exp(M^-1 (theta_tilde - b)).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import DomainError

# Relative slack when validating unscaled values against the box and
# absolute slack when validating scaled values against the cube.  Both
# exist so that a point mapped onto a face and back does not fail its
# own precondition through rounding.
BOUND_RTOL = 1e-9
CLAMP_TOL = 1e-9


@dataclass(frozen=True)
class ParameterSpec:
    """One box dimension: bounds and the nominal operating value."""

    name: str
    lower: float
    upper: float
    nominal: float

    def __post_init__(self):
        if not (0.0 < self.lower < self.upper):
            raise ValueError(
                f"parameter {self.name!r}: bounds must satisfy 0 < lower < upper, "
                f"got [{self.lower}, {self.upper}]"
            )
        if not (self.lower <= self.nominal <= self.upper):
            raise ValueError(
                f"parameter {self.name!r}: nominal {self.nominal} outside "
                f"[{self.lower}, {self.upper}]"
            )


@dataclass(frozen=True)
class Scenario:
    """Fixed deployment quantities that are not part of the design box."""

    n_laa: int
    n_wifi: int
    n_laa_ue: int
    n_wifi_sta: int
    n_channels: int
    width_m: float
    height_m: float

    def __post_init__(self):
        for field in ("n_laa", "n_wifi", "n_laa_ue", "n_wifi_sta"):
            if getattr(self, field) < 0:
                raise ValueError(f"scenario field {field} must be >= 0")
        if self.n_channels < 1:
            raise ValueError("scenario field n_channels must be >= 1")
        if self.width_m <= 0 or self.height_m <= 0:
            raise ValueError("scenario dimensions must be positive")


@dataclass(frozen=True, eq=False)
class ParameterSpace:
    """A box of positive parameters plus its cached scaling map."""

    specs: tuple[ParameterSpec, ...]

    def __post_init__(self):
        if not self.specs:
            raise ValueError("parameter space needs at least one parameter")
        names = [s.name for s in self.specs]
        if len(set(names)) != len(names):
            raise ValueError("duplicate parameter names")
        lower = np.array([s.lower for s in self.specs])
        upper = np.array([s.upper for s in self.specs])
        nominal = np.array([s.nominal for s in self.specs])
        log_mid = 0.5 * (np.log(lower) + np.log(upper))
        m_diag = 2.0 / (np.log(upper) - np.log(lower))
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "nominal", nominal)
        object.__setattr__(self, "m_diag", m_diag)
        object.__setattr__(self, "b", -m_diag * log_mid)

    @property
    def dim(self) -> int:
        return len(self.specs)

    @property
    def names(self) -> list[str]:
        return [s.name for s in self.specs]


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Matched scaled / original sample coordinates with optional values."""

    scaled: np.ndarray
    original: np.ndarray
    values_l: np.ndarray | None = None
    values_w: np.ndarray | None = None

    def __post_init__(self):
        if self.scaled.ndim != 2 or self.scaled.shape != self.original.shape:
            raise ValueError("scaled and original must be matching (n, m) arrays")
        for vals in (self.values_l, self.values_w):
            if vals is not None and vals.shape != (self.scaled.shape[0],):
                raise ValueError("objective values must be one per sample")

    @property
    def n(self) -> int:
        return self.scaled.shape[0]


def scale_to_unit(theta: np.ndarray, space: ParameterSpace) -> np.ndarray:
    """Map box coordinates onto the centered unit cube.

    Accepts a single m-vector or an (n, m) batch.  Values must lie inside
    the box up to a relative slack of ``BOUND_RTOL``; anything else names
    the offending parameter in a :class:`DomainError`.
    """
    theta = np.asarray(theta, dtype=float)
    squeeze = theta.ndim == 1
    pts = np.atleast_2d(theta)
    if pts.shape[1] != space.dim:
        raise DomainError(f"expected {space.dim} parameters, got {pts.shape[1]}")
    if not np.all(np.isfinite(pts)):
        raise DomainError("non-finite parameter value")
    low_ok = pts >= space.lower * (1.0 - BOUND_RTOL)
    high_ok = pts <= space.upper * (1.0 + BOUND_RTOL)
    bad = ~(low_ok & high_ok)
    if bad.any():
        row, col = np.argwhere(bad)[0]
        name = space.specs[col].name
        raise DomainError(
            f"parameter {name!r} = {pts[row, col]} outside "
            f"[{space.lower[col]}, {space.upper[col]}]"
        )
    out = space.m_diag * np.log(pts) + space.b
    # Rounding can push a face point across +-1 by ~1e-16; fold it back so
    # the advertised postcondition holds exactly.
    out = np.clip(out, -1.0, 1.0)
    return out[0] if squeeze else out


def unscale_from_unit(
    theta_tilde: np.ndarray,
    space: ParameterSpace,
    clamp_tol: float = CLAMP_TOL,
) -> np.ndarray:
    """Map cube coordinates back into the box.

    Components may overshoot +-1 by at most ``clamp_tol`` (finite
    differencing at a face needs this); they are clipped onto the cube
    before the exponential map, so the result is always inside the box.
    """
    theta_tilde = np.asarray(theta_tilde, dtype=float)
    squeeze = theta_tilde.ndim == 1
    pts = np.atleast_2d(theta_tilde)
    if pts.shape[1] != space.dim:
        raise DomainError(f"expected {space.dim} coordinates, got {pts.shape[1]}")
    if not np.all(np.isfinite(pts)):
        raise DomainError("non-finite scaled coordinate")
    over = np.abs(pts) - 1.0
    if np.any(over > clamp_tol):
        row, col = np.argwhere(over > clamp_tol)[0]
        name = space.specs[col].name
        raise DomainError(
            f"scaled coordinate for {name!r} = {pts[row, col]} outside "
            f"[-1, 1] by more than {clamp_tol}"
        )
    pts = np.clip(pts, -1.0, 1.0)
    out = np.exp((pts - space.b) / space.m_diag)
    return out[0] if squeeze else out


def sample_uniform(space: ParameterSpace, n: int, seed: int) -> SampleSet:
    """Draw n points uniformly from the scaled cube (log-uniform in the box)."""
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    scaled = rng.uniform(-1.0, 1.0, size=(n, space.dim))
    return SampleSet(scaled=scaled, original=unscale_from_unit(scaled, space))


def load_parameter_space(path: str | Path) -> tuple[ParameterSpace, Scenario]:
    """Load a parameter-space JSON file.

    Schema::

        {"parameters": [{"name", "lower", "upper", "nominal"}, ...],
         "scenario": {"n_laa", "n_wifi", "n_laa_ue", "n_wifi_sta",
                      "n_channels", "width_m", "height_m"}}
    """
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    try:
        specs = tuple(
            ParameterSpec(
                name=p["name"],
                lower=float(p["lower"]),
                upper=float(p["upper"]),
                nominal=float(p["nominal"]),
            )
            for p in raw["parameters"]
        )
        sc = raw["scenario"]
        scenario = Scenario(
            n_laa=int(sc["n_laa"]),
            n_wifi=int(sc["n_wifi"]),
            n_laa_ue=int(sc["n_laa_ue"]),
            n_wifi_sta=int(sc["n_wifi_sta"]),
            n_channels=int(sc["n_channels"]),
            width_m=float(sc["width_m"]),
            height_m=float(sc["height_m"]),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}: malformed parameter space file: {exc}") from exc
    return ParameterSpace(specs), scenario


def table1_path() -> Path:
    """Path of the bundled 17-parameter coexistence box."""
    return Path(resources.files("paretotrace").joinpath("data/table1.json"))


def load_table1() -> tuple[ParameterSpace, Scenario]:
    """The bundled 17-parameter coexistence box and its fixed scenario."""
    return load_parameter_space(table1_path())
