"""Geodesics between active subspaces and maximin-fit mixing.

Two objectives rarely share an active subspace.  Both r-dimensional
frames are points on the Grassmann manifold Gr(m, r), and the geodesic
between them is computed from the thin SVD

    (I - W0 W0^T) W1 (W0^T W1)^-1 = U diag(tan theta_i) V^T,

where theta_i are the principal angles.  Points along the path,

    U_r(s) = orthonorm(W0 V cos(s Theta) + U sin(s Theta)),

interpolate the two spans; s = 0 is W0 and s = 1 is W1.  Mixing picks
the s whose frame explains both objectives best in the maximin sense:
maximize over s the smaller of the two ridge-fit R^2 values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FitError, OrthogonalSubspaceError
from .subspace import Frame, _design_matrix, monomial_exponents, project

SINGULAR_TOL = 1e-12
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def principal_angles(a: Frame, b: Frame) -> np.ndarray:
    """Principal angles between two equal-rank spans, ascending, in [0, pi/2].

    Cosines alone lose half the significant digits near zero angle, so
    small angles are recovered from the sine singular values of
    B - A (A^T B) instead.
    """
    if a.basis.shape != b.basis.shape:
        raise ValueError("frames must have matching shape")
    overlap = a.basis.T @ b.basis
    cosines = np.clip(np.linalg.svd(overlap, compute_uv=False), 0.0, 1.0)
    sines = np.linalg.svd(b.basis - a.basis @ overlap, compute_uv=False)
    sines = np.clip(sines[::-1], 0.0, 1.0)  # ascending, aligned with cos desc
    angles = np.where(
        cosines**2 > 0.5, np.arcsin(sines), np.arccos(cosines)
    )
    return np.sort(angles)


def subspace_distance(a: Frame, b: Frame) -> float:
    """Geodesic distance on Gr(m, r): l2 norm of the principal angles."""
    return float(np.linalg.norm(principal_angles(a, b)))


@dataclass(frozen=True, eq=False)
class GeodesicPath:
    """Grassmann geodesic from w0 (s = 0) to w1 (s = 1)."""

    w0: Frame
    w1: Frame
    angles: np.ndarray
    _left: np.ndarray
    _rotation: np.ndarray

    def evaluate(self, s: float) -> Frame:
        """Orthonormal frame at path parameter s."""
        c = np.cos(s * self.angles)
        sn = np.sin(s * self.angles)
        basis = self.w0.basis @ (self._rotation * c) + self._left * sn
        q, r = np.linalg.qr(basis)
        signs = np.sign(np.diag(r))
        signs[signs == 0] = 1.0
        return Frame(q * signs)

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.angles))


def geodesic(w0: Frame, w1: Frame) -> GeodesicPath:
    """Construct the geodesic between two equal-rank frames.

    Requires W0^T W1 nonsingular; a singular overlap means some
    direction of one span is orthogonal to all of the other, where this
    parametrization (and the notion of a unique geodesic) breaks down.
    """
    if w0.basis.shape != w1.basis.shape:
        raise ValueError("frames must have matching shape")
    overlap = w0.basis.T @ w1.basis
    if np.min(np.linalg.svd(overlap, compute_uv=False)) < SINGULAR_TOL:
        raise OrthogonalSubspaceError(
            "subspaces contain mutually orthogonal directions; "
            "no unique geodesic"
        )
    residual = w1.basis - w0.basis @ overlap  # (I - W0 W0^T) W1
    g = residual @ np.linalg.inv(overlap)
    u, sig, vt = np.linalg.svd(g, full_matrices=False)
    angles = np.arctan(sig)
    return GeodesicPath(
        w0=w0, w1=w1, angles=angles, _left=u, _rotation=vt.T
    )


def _r2_pair(
    y: np.ndarray,
    values_l: np.ndarray,
    values_w: np.ndarray,
    degree: int,
) -> tuple[float, float]:
    """R^2 of degree-`degree` fits of both value sets over shared coords."""
    exponents = monomial_exponents(y.shape[1], degree)
    design = _design_matrix(y, exponents)
    stacked = np.column_stack([values_l, values_w])
    coef, _, rank, _ = np.linalg.lstsq(design, stacked, rcond=None)
    if rank < len(exponents):
        raise FitError(
            f"rank-deficient design while mixing (n = {y.shape[0]}, "
            f"degree = {degree})"
        )
    resid = stacked - design @ coef
    ss_res = np.sum(resid**2, axis=0)
    centered = stacked - stacked.mean(axis=0)
    ss_tot = np.sum(centered**2, axis=0)
    r2 = np.where(ss_tot == 0.0, 1.0, 1.0 - ss_res / np.where(ss_tot == 0, 1, ss_tot))
    return float(r2[0]), float(r2[1])


@dataclass(frozen=True, eq=False)
class MixResult:
    """Outcome of the maximin mixing search along a geodesic."""

    s_star: float
    frame: Frame
    r2_l: float
    r2_w: float
    trace: np.ndarray  # rows (s, r2_l, r2_w), sorted by s


def mix_subspaces(
    path: GeodesicPath,
    points_scaled: np.ndarray,
    values_l: np.ndarray,
    values_w: np.ndarray,
    degree: int = 2,
    grid: int = 100,
    refine_tol: float = 1e-4,
) -> MixResult:
    """Maximize min(R^2_L(s), R^2_W(s)) over the geodesic parameter.

    A uniform grid of grid + 1 points covers [0, 1]; the best grid cell
    is then refined by golden-section search until the bracket is
    narrower than ``refine_tol``.  Each evaluation refits both ridge
    models in the frame at s.  The winner is the best evaluation seen
    anywhere, with exact ties resolved toward the smaller s, so the
    result can never be worse than either endpoint.
    """
    if grid < 2:
        raise ValueError(f"grid must be >= 2, got {grid}")
    points_scaled = np.asarray(points_scaled, dtype=float)
    evaluations: list[tuple[float, float, float]] = []

    def measure(s: float) -> float:
        y = project(path.evaluate(s), points_scaled)
        r2l, r2w = _r2_pair(np.atleast_2d(y), values_l, values_w, degree)
        evaluations.append((s, r2l, r2w))
        return min(r2l, r2w)

    svals = np.linspace(0.0, 1.0, grid + 1)
    scores = np.array([measure(s) for s in svals])
    k = int(np.argmax(scores))
    lo = svals[max(k - 1, 0)]
    hi = svals[min(k + 1, grid)]

    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1, f2 = measure(x1), measure(x2)
    while hi - lo > refine_tol:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INVPHI * (hi - lo)
            f2 = measure(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INVPHI * (hi - lo)
            f1 = measure(x1)

    best = max(min(r2l, r2w) for _, r2l, r2w in evaluations)
    s_star = min(s for s, r2l, r2w in evaluations if min(r2l, r2w) == best)
    frame = path.evaluate(s_star)
    y = np.atleast_2d(project(frame, points_scaled))
    r2_l, r2_w = _r2_pair(y, values_l, values_w, degree)
    trace = np.array(sorted(evaluations))
    return MixResult(s_star=s_star, frame=frame, r2_l=r2_l, r2_w=r2_w, trace=trace)
