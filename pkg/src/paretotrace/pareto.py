"""Pareto-front tracing over a pair of convex quadratic surrogates.

The scalarized objective J_t = t S_L + (1 - t) S_W has, for each t, the
unique unconstrained maximizer

    y(t) = -(1/2) [t Q_L + (1-t) Q_W]^-1 [t a_L + (1-t) a_W],

which sweeps a continuous curve from the S_W optimum (t = 0) to the S_L
optimum (t = 1).  The same curve solves the predictor ODE

    (t hess S_L + (1-t) hess S_W) dy/dt = grad S_W - grad S_L,

which is also usable with exact derivatives of non-quadratic objectives.
Support code here decides whether active coordinates are reachable from
the box (the shadow of the cube is a zonotope), samples the inactive
fiber over a trace point, and filters sampled objective pairs down to
their non-dominated subset.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.optimize import linprog

from .domain import ParameterSpace, Scenario, unscale_from_unit
from .errors import (
    ContinuationError,
    InfeasibleFiberError,
    TraceSingularityError,
)
from .gradients import ObjectivePair, _check_value
from .subspace import Frame, QuadraticSurrogate

DOMAIN_SLACK = 1e-9
CONDITION_LIMIT = 1e12
STATIONARITY_TOL = 1e-8
REJECTION_BUDGET_PER_SAMPLE = 1000
HIT_AND_RUN_BURN_IN = 200
HIT_AND_RUN_THIN = 25


@dataclass(frozen=True, eq=False)
class ParetoTrace:
    """Trace of scalarized optima: one row per t in [0, 1]."""

    ts: np.ndarray
    ys: np.ndarray
    s_l: np.ndarray
    s_w: np.ndarray
    in_domain: np.ndarray
    thetas: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.ts.size


@dataclass(frozen=True, eq=False)
class FrontSample:
    """Indices of the non-dominated rows of a sampled objective pair."""

    indices: np.ndarray
    points: np.ndarray


@dataclass(frozen=True, eq=False)
class FrontCurve:
    """True-objective statistics along the in-domain part of a trace."""

    ts: np.ndarray
    mean_l: np.ndarray
    mean_w: np.ndarray
    min_l: np.ndarray
    max_l: np.ndarray
    min_w: np.ndarray
    max_w: np.ndarray
    evaluations_per_objective: int = 0


def scalarize(
    surrogate_l: QuadraticSurrogate,
    surrogate_w: QuadraticSurrogate,
    t: float,
) -> QuadraticSurrogate:
    """Quadratic form of -J_t, the convex combination of the -S forms."""
    if not (0.0 <= t <= 1.0):
        raise ValueError(f"t must be in [0, 1], got {t}")
    return QuadraticSurrogate(
        q=t * surrogate_l.q + (1.0 - t) * surrogate_w.q,
        a=t * surrogate_l.a + (1.0 - t) * surrogate_w.a,
        c=t * surrogate_l.c + (1.0 - t) * surrogate_w.c,
        convexified=surrogate_l.convexified or surrogate_w.convexified,
    )


def _check_ts(ts: np.ndarray) -> np.ndarray:
    ts = np.asarray(ts, dtype=float)
    if ts.ndim != 1 or ts.size < 2:
        raise ValueError("need at least two trace parameters")
    if ts[0] < 0.0 or ts[-1] > 1.0 or np.any(np.diff(ts) <= 0):
        raise ValueError("trace parameters must be strictly increasing in [0, 1]")
    return ts


def _require_spd(q: np.ndarray, label: str):
    try:
        np.linalg.cholesky(q)
    except np.linalg.LinAlgError:
        raise ValueError(f"{label} quadratic form is not positive definite")


def quadratic_trace(
    surrogate_l: QuadraticSurrogate,
    surrogate_w: QuadraticSurrogate,
    ts: np.ndarray,
    frame: Frame | None = None,
) -> ParetoTrace:
    """Closed-form trace of the scalarized optima at the given t grid.

    With a frame, each point also gets full-space coordinates and an
    in-domain flag telling whether any box point projects onto it.
    """
    ts = _check_ts(ts)
    _require_spd(surrogate_l.q, "objective-L")
    _require_spd(surrogate_w.q, "objective-W")
    r = surrogate_l.r
    ys = np.empty((ts.size, r))
    for i, t in enumerate(ts):
        q_t = t * surrogate_l.q + (1.0 - t) * surrogate_w.q
        a_t = t * surrogate_l.a + (1.0 - t) * surrogate_w.a
        try:
            factor = cho_factor(q_t)
        except np.linalg.LinAlgError as exc:
            raise TraceSingularityError(
                f"blended quadratic form singular at t = {t}", t=t
            ) from exc
        ys[i] = cho_solve(factor, -0.5 * a_t)
    if not np.all(np.isfinite(ys)):
        raise TraceSingularityError("trace produced non-finite coordinates")
    s_l = np.array([surrogate_l.value(y) for y in ys])
    s_w = np.array([surrogate_w.value(y) for y in ys])
    thetas = None
    in_domain = np.ones(ts.size, dtype=bool)
    if frame is not None:
        thetas = ys @ frame.basis.T
        in_domain = _in_domain_flags(frame, ys)
    return ParetoTrace(
        ts=ts, ys=ys, s_l=s_l, s_w=s_w, in_domain=in_domain, thetas=thetas
    )


def ode_trace(
    grad_l,
    grad_w,
    hess_l,
    hess_w,
    y0: np.ndarray,
    steps: int,
    frame: Frame | None = None,
    value_l=None,
    value_w=None,
    cond_limit: float = CONDITION_LIMIT,
) -> ParetoTrace:
    """Integrate the predictor ODE from the t = 0 optimum with classical RK4.

    The callables take active coordinates y and return values/derivatives
    of the two objectives in the maximize orientation.  y0 must actually
    be the t = 0 optimum (grad S_W vanishes there); each right-hand side
    solves against the scalarized Hessian, which must stay negative
    definite and better conditioned than ``cond_limit``.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    y0 = np.asarray(y0, dtype=float)
    g0 = np.asarray(grad_w(y0), dtype=float)
    if np.linalg.norm(g0) > STATIONARITY_TOL:
        raise ValueError(
            f"y0 is not the t = 0 optimum: |grad S_W| = {np.linalg.norm(g0):.3e}"
        )

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        h_t = t * np.asarray(hess_l(y), float) + (1.0 - t) * np.asarray(
            hess_w(y), float
        )
        cond = np.linalg.cond(h_t, 1)
        if not np.isfinite(cond) or cond > cond_limit:
            raise ContinuationError(
                f"scalarized Hessian condition {cond:.3e} exceeds "
                f"{cond_limit:.1e} at t = {t:.6f}",
                t=t,
            )
        try:
            factor = cho_factor(-h_t)
        except np.linalg.LinAlgError as exc:
            raise ContinuationError(
                f"scalarized Hessian not negative definite at t = {t:.6f}", t=t
            ) from exc
        g = np.asarray(grad_w(y), float) - np.asarray(grad_l(y), float)
        return -cho_solve(factor, g)

    ts = np.linspace(0.0, 1.0, steps + 1)
    dt = 1.0 / steps
    ys = np.empty((steps + 1, y0.size))
    ys[0] = y0
    y = y0.copy()
    for i in range(steps):
        t = ts[i]
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1)
        k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2)
        k4 = rhs(t + dt, y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise ContinuationError(
                f"trace diverged at t = {ts[i + 1]:.6f}", t=ts[i + 1]
            )
        ys[i + 1] = y
    nan = np.full(steps + 1, np.nan)
    s_l = np.array([value_l(y) for y in ys]) if value_l is not None else nan
    s_w = np.array([value_w(y) for y in ys]) if value_w is not None else nan.copy()
    thetas = None
    in_domain = np.ones(steps + 1, dtype=bool)
    if frame is not None:
        thetas = ys @ frame.basis.T
        in_domain = _in_domain_flags(frame, ys)
    return ParetoTrace(
        ts=ts, ys=ys, s_l=s_l, s_w=s_w, in_domain=in_domain, thetas=thetas
    )


def non_dominated(points: np.ndarray) -> FrontSample:
    """Indices of the maximal points of an (n, 2) array of (S_L, S_W) pairs.

    Single descending sweep: sort by S_L descending with S_W descending
    as tie-break, then keep a point iff its S_W strictly exceeds the
    running maximum.  Exact duplicates of a kept point are kept too.
    Returned indices are ascending; ties and duplicates make this
    deterministic.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be an (n, 2) array")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    order = np.lexsort((-pts[:, 1], -pts[:, 0]))
    keep: list[int] = []
    best_w = -np.inf
    last = None
    for idx in order:
        sl, sw = pts[idx]
        if sw > best_w:
            keep.append(int(idx))
            best_w = sw
            last = (sl, sw)
        elif last is not None and sl == last[0] and sw == last[1]:
            keep.append(int(idx))
    indices = np.sort(np.asarray(keep, dtype=int))
    return FrontSample(indices=indices, points=pts[indices])


@dataclass(frozen=True, eq=False)
class Zonotope2D:
    """Shadow of the cube [-1, 1]^m under a rank-2 frame.

    The projection {U^T x : x in [-1,1]^m} is a centrally symmetric
    convex polygon whose edge directions are the frame rows.
    """

    vertices: np.ndarray  # (k, 2), counterclockwise
    generators: np.ndarray  # (m, 2) original frame rows

    def contains(self, points: np.ndarray, slack: float = DOMAIN_SLACK) -> np.ndarray:
        """Half-plane membership with a signed-distance slack."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        v = self.vertices
        edges = np.roll(v, -1, axis=0) - v
        lengths = np.linalg.norm(edges, axis=1)
        # cross(edge_i, p - v_i) / |edge_i| >= -slack for all edges
        rel_x = pts[:, 0][None, :] - v[:, 0][:, None]
        rel_y = pts[:, 1][None, :] - v[:, 1][:, None]
        cross = (edges[:, 0][:, None] * rel_y - edges[:, 1][:, None] * rel_x)
        signed = cross / lengths[:, None]
        inside = np.all(signed >= -slack, axis=0)
        return inside if np.asarray(points).ndim == 2 else bool(inside[0])

    def support(self, direction: np.ndarray) -> float:
        """Support function h(d) = max over the zonotope of <v, d>."""
        d = np.asarray(direction, dtype=float)
        return float(np.max(self.vertices @ d))


def project_domain_2d(frame: Frame) -> Zonotope2D:
    """Explicit vertex list of the cube's shadow under a rank-2 frame.

    Generators (frame rows) are canonicalized into the upper half plane,
    merged when parallel, sorted by angle, and walked twice around the
    boundary; the polygon has at most 2m vertices and is centrally
    symmetric.
    """
    if frame.r != 2:
        raise ValueError(f"zonotope projection needs a rank-2 frame, got r = {frame.r}")
    gens = frame.basis.copy()
    norms = np.linalg.norm(gens, axis=1)
    gens = gens[norms > 1e-15]
    # fold into angle range [0, pi): flip rows pointing below the x-axis
    flip = (gens[:, 1] < 0) | ((gens[:, 1] == 0) & (gens[:, 0] < 0))
    gens[flip] = -gens[flip]
    angles = np.arctan2(gens[:, 1], gens[:, 0])
    order = np.argsort(angles, kind="stable")
    gens = gens[order]
    angles = angles[order]
    merged = [gens[0].copy()]
    for g, ang, prev in zip(gens[1:], angles[1:], angles[:-1]):
        if ang - prev < 1e-12:
            merged[-1] += g
        else:
            merged.append(g.copy())
    merged = np.asarray(merged)
    if merged.shape[0] < 2:
        raise ValueError("degenerate projection: all generators parallel")
    half = np.cumsum(2.0 * merged, axis=0)
    start = -merged.sum(axis=0)
    upper = start + half  # walk from -sum to +sum
    lower = -upper  # central symmetry gives the way back
    vertices = np.vstack([[start], upper[:-1], [-start], lower[:-1]])
    return Zonotope2D(vertices=vertices, generators=frame.basis.copy())


def _fiber_lp(frame: Frame, y: np.ndarray) -> np.ndarray | None:
    """Interior cube point on the fiber (Chebyshev-style), or None."""
    m, r = frame.m, frame.r
    # variables (x, delta): maximize delta s.t. U^T x = y, |x_i| <= 1 - delta
    c = np.zeros(m + 1)
    c[-1] = -1.0
    a_ub = np.block(
        [[np.eye(m), np.ones((m, 1))], [-np.eye(m), np.ones((m, 1))]]
    )
    b_ub = np.ones(2 * m)
    a_eq = np.hstack([frame.basis.T, np.zeros((r, 1))])
    bounds = [(-1.0, 1.0)] * m + [(0.0, 1.0)]
    res = linprog(
        c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=np.asarray(y, float),
        bounds=bounds, method="highs",
    )
    if not res.success:
        return None
    return res.x[:m]


def in_projected_domain(frame: Frame, y: np.ndarray) -> bool:
    """Whether some point of the cube projects onto active coordinates y."""
    flags = _in_domain_flags(frame, np.atleast_2d(np.asarray(y, dtype=float)))
    return bool(flags[0])


def _in_domain_flags(frame: Frame, ys: np.ndarray) -> np.ndarray:
    ys = np.atleast_2d(ys)
    if frame.r == 1:
        radius = float(np.sum(np.abs(frame.basis)))
        return np.abs(ys[:, 0]) <= radius + DOMAIN_SLACK
    if frame.r == 2:
        return project_domain_2d(frame).contains(ys)
    return np.array([_fiber_lp(frame, y) is not None for y in ys])


def sample_inactive_fiber(
    frame: Frame,
    y: np.ndarray,
    k: int,
    space: ParameterSpace,
    seed: int,
) -> np.ndarray:
    """k scaled cube points whose active coordinates all equal y.

    The fiber is the slice {U y + U_perp z} of the cube.  Rejection from
    a bounding box of the slice is exact and is tried first with a
    budget of 1000 k draws; thin slices fall back to hit-and-run along
    exact cube chords, started from an interior point found by linear
    programming when the min-norm preimage U y is outside the cube.
    """
    if k < 1:
        raise ValueError(f"fiber sample count must be >= 1, got {k}")
    y = np.asarray(y, dtype=float)
    m, r = frame.m, frame.r
    if y.shape != (r,):
        raise ValueError(f"active point must have shape ({r},)")
    if space.dim != m:
        raise ValueError("frame and space dimensions disagree")
    base = frame.basis @ y
    base_feasible = np.max(np.abs(base)) <= 1.0 + DOMAIN_SLACK
    if not in_projected_domain(frame, y):
        raise InfeasibleFiberError(
            f"no point of the cube projects onto y = {y.tolist()}"
        )
    if r == m:
        return np.clip(np.repeat(base[None, :], k, axis=0), -1.0, 1.0)
    q_full, _ = np.linalg.qr(frame.basis, mode="complete")
    perp = q_full[:, r:]
    rng = np.random.default_rng(seed)

    # exact rejection: any fiber point has |z| <= sqrt(m) componentwise
    rho = np.sqrt(m)
    accepted: list[np.ndarray] = []
    budget = REJECTION_BUDGET_PER_SAMPLE * k
    spent = 0
    batch = max(4 * k, 256)
    while spent < budget and len(accepted) < k:
        n_draw = min(batch, budget - spent)
        z = rng.uniform(-rho, rho, size=(n_draw, m - r))
        candidates = base[None, :] + z @ perp.T
        good = np.all(np.abs(candidates) <= 1.0, axis=1)
        accepted.extend(candidates[good])
        spent += n_draw
    if len(accepted) >= k:
        return np.asarray(accepted[:k])

    # hit-and-run fallback along exact chords of the cube slice
    if base_feasible:
        x = np.clip(base, -1.0, 1.0)
    else:
        x = _fiber_lp(frame, y)
        if x is None:
            raise InfeasibleFiberError(
                f"no point of the cube projects onto y = {y.tolist()}"
            )
        x = np.clip(x, -1.0, 1.0)
    out = np.empty((k, m))
    emitted = 0
    step = 0
    while emitted < k:
        v = rng.standard_normal(m - r)
        d = perp @ (v / np.linalg.norm(v))
        with np.errstate(divide="ignore", invalid="ignore"):
            to_low = (-1.0 - x) / d
            to_high = (1.0 - x) / d
        t_min = np.where(d > 0, to_low, np.where(d < 0, to_high, -np.inf))
        t_max = np.where(d > 0, to_high, np.where(d < 0, to_low, np.inf))
        lo = np.max(t_min)
        hi = np.min(t_max)
        if hi > lo:
            x = x + rng.uniform(lo, hi) * d
        step += 1
        if step >= HIT_AND_RUN_BURN_IN and (step - HIT_AND_RUN_BURN_IN) % HIT_AND_RUN_THIN == 0:
            # re-project onto the fiber, then fold back into the cube
            fixed = x + frame.basis @ (y - frame.basis.T @ x)
            out[emitted] = np.clip(fixed, -1.0, 1.0)
            emitted += 1
    return out


def evaluate_trace_objectives(
    trace: ParetoTrace,
    pair: ObjectivePair,
    frame: Frame,
    space: ParameterSpace,
    scenario: Scenario,
    k: int = 25,
    seed: int = 0,
) -> FrontCurve:
    """True objective statistics over fibers of the in-domain trace points.

    Each in-domain point gets k fiber samples; both objectives are
    evaluated at every sample, giving per-point mean, min and max.
    """
    sel = np.flatnonzero(trace.in_domain)
    stats = {name: [] for name in ("ml", "mw", "nl", "xl", "nw", "xw")}
    total = 0
    for j, i in enumerate(sel):
        fiber = sample_inactive_fiber(
            frame, trace.ys[i], k, space, seed=seed * 1000003 + int(i)
        )
        thetas = unscale_from_unit(fiber, space)
        vl = np.array(
            [_check_value(pair.objective_l(t, scenario), i) for t in thetas]
        )
        vw = np.array(
            [_check_value(pair.objective_w(t, scenario), i) for t in thetas]
        )
        total += k
        stats["ml"].append(vl.mean())
        stats["mw"].append(vw.mean())
        stats["nl"].append(vl.min())
        stats["xl"].append(vl.max())
        stats["nw"].append(vw.min())
        stats["xw"].append(vw.max())
    return FrontCurve(
        ts=trace.ts[sel],
        mean_l=np.asarray(stats["ml"]),
        mean_w=np.asarray(stats["mw"]),
        min_l=np.asarray(stats["nl"]),
        max_l=np.asarray(stats["xl"]),
        min_w=np.asarray(stats["nw"]),
        max_w=np.asarray(stats["xw"]),
        evaluations_per_objective=total,
    )
