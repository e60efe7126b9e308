"""Active-subspace frames, ridge surrogates, and their quadratic form.

A frame is an orthonormal m x r basis whose span approximates where an
objective varies.  Projecting samples onto the frame and fitting a low
degree polynomial in the projected coordinates gives a cheap surrogate
S(theta) ~ H(W_r^T theta); degree-2 fits are additionally exported as
convex quadratic forms in the minimize orientation

    -S(theta) ~ y^T Q y + a^T y + c,   y = W_r^T theta_tilde,

with Q forced positive definite by flooring its eigenvalues.  That form
is what the Pareto tracing consumes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpectrumError, FitError

ORTHONORMAL_TOL = 1e-10
EIGENVALUE_FLOOR = 1e-300  # keeps log-gaps finite on exactly-zero tails
RANK_NOISE_RTOL = 1e-12  # eigenvalues below this fraction of the top are noise


@dataclass(frozen=True, eq=False)
class Frame:
    """Orthonormal basis (m, r) of an active subspace, columns = directions."""

    basis: np.ndarray

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=float)
        if basis.ndim == 1:
            basis = basis[:, None]
        object.__setattr__(self, "basis", basis)
        m, r = basis.shape
        if not (1 <= r <= m):
            raise ValueError(f"frame shape {basis.shape} must satisfy 1 <= r <= m")
        gram = basis.T @ basis
        if np.max(np.abs(gram - np.eye(r))) > ORTHONORMAL_TOL:
            raise ValueError("frame columns are not orthonormal")

    @property
    def m(self) -> int:
        return self.basis.shape[0]

    @property
    def r(self) -> int:
        return self.basis.shape[1]


def select_rank(eigenvalues: np.ndarray, override: int | None = None) -> int:
    """Pick the subspace rank at the largest log-eigenvalue gap.

    An explicit override wins unconditionally.  Ranks whose last kept
    eigenvalue sits below the relative noise floor are not candidates:
    gaps between floating-point dust would otherwise dominate the real
    signal gap.  A spectrum that is zero everywhere has no preferred
    directions and raises :class:`DegenerateSpectrumError`.
    """
    vals = np.asarray(eigenvalues, dtype=float)
    m = vals.size
    if override is not None:
        if not (1 <= override <= m):
            raise ValueError(f"rank override {override} outside [1, {m}]")
        return int(override)
    if m == 0 or np.max(vals) <= 0:
        raise DegenerateSpectrumError("spectrum is identically zero")
    if m == 1:
        return 1
    logs = np.log(np.maximum(vals, EIGENVALUE_FLOOR))
    gaps = logs[:-1] - logs[1:]
    gaps = np.where(vals[:-1] > RANK_NOISE_RTOL * vals[0], gaps, -np.inf)
    # argmax takes the first maximal gap, so ties resolve to the smaller rank
    return int(np.argmax(gaps)) + 1


def project(frame: Frame, points_scaled: np.ndarray) -> np.ndarray:
    """Active coordinates y = W_r^T theta_tilde for one point or a batch."""
    pts = np.asarray(points_scaled, dtype=float)
    if pts.ndim == 1:
        return frame.basis.T @ pts
    return pts @ frame.basis


def monomial_exponents(r: int, degree: int) -> list[tuple[int, ...]]:
    """All exponent tuples with total degree <= degree, graded, leading
    variable descending within each grade."""
    if r < 1 or degree < 0:
        raise ValueError("need r >= 1 and degree >= 0")

    def compositions(total: int, parts: int):
        if parts == 1:
            yield (total,)
            return
        for first in range(total, -1, -1):
            for rest in compositions(total - first, parts - 1):
                yield (first,) + rest

    out: list[tuple[int, ...]] = []
    for total in range(degree + 1):
        out.extend(compositions(total, r))
    return out


def _design_matrix(y: np.ndarray, exponents: list[tuple[int, ...]]) -> np.ndarray:
    y = np.atleast_2d(y)
    cols = [np.prod(y ** np.asarray(e), axis=1) for e in exponents]
    return np.column_stack(cols)


@dataclass(frozen=True, eq=False)
class RidgeModel:
    """Polynomial surrogate in the active coordinates of a frame."""

    frame: Frame
    degree: int
    exponents: list[tuple[int, ...]]
    coefficients: np.ndarray
    r_squared: float

    def predict_active(self, y: np.ndarray) -> np.ndarray:
        return _design_matrix(y, self.exponents) @ self.coefficients

    def predict(self, points_scaled: np.ndarray) -> np.ndarray:
        return self.predict_active(np.atleast_2d(project(self.frame, points_scaled)))


def fit_ridge(
    points_scaled: np.ndarray,
    values: np.ndarray,
    frame: Frame,
    degree: int,
) -> RidgeModel:
    """Least-squares polynomial fit of values over the projected samples.

    Raises :class:`FitError` when the design matrix is rank deficient,
    which covers both too few samples and degenerate sample geometry.
    R^2 is 1 by convention when the values are exactly constant.
    """
    if degree < 1:
        raise ValueError(f"degree must be >= 1, got {degree}")
    values = np.asarray(values, dtype=float)
    y = np.atleast_2d(project(frame, points_scaled))
    exponents = monomial_exponents(frame.r, degree)
    design = _design_matrix(y, exponents)
    n, k = design.shape
    if values.shape != (n,):
        raise ValueError("values must be one per sample")
    coef, _, rank, _ = np.linalg.lstsq(design, values, rcond=None)
    if rank < k:
        raise FitError(
            f"design matrix rank {rank} < {k} coefficients "
            f"(n = {n}, degree = {degree}, r = {frame.r})"
        )
    residual = values - design @ coef
    ss_res = float(residual @ residual)
    centered = values - values.mean()
    ss_tot = float(centered @ centered)
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return RidgeModel(
        frame=frame,
        degree=degree,
        exponents=exponents,
        coefficients=coef,
        r_squared=r_squared,
    )


@dataclass(frozen=True, eq=False)
class QuadraticSurrogate:
    """Convex quadratic model of -S in active coordinates.

    -S(y) ~ y^T q y + a^T y + c with q symmetric positive definite.
    ``value`` and ``gradient`` are in the S (maximize) orientation.
    """

    q: np.ndarray
    a: np.ndarray
    c: float
    convexified: bool = False

    @property
    def r(self) -> int:
        return self.a.size

    def neg_value(self, y: np.ndarray) -> float:
        y = np.asarray(y, dtype=float)
        return float(y @ self.q @ y + self.a @ y + self.c)

    def value(self, y: np.ndarray) -> float:
        return -self.neg_value(y)

    def gradient(self, y: np.ndarray) -> np.ndarray:
        return -(2.0 * self.q @ np.asarray(y, dtype=float) + self.a)

    def hessian(self) -> np.ndarray:
        return -2.0 * self.q

    def maximizer(self) -> np.ndarray:
        """Unconstrained argmax of the surrogate, -q^-1 a / 2."""
        return np.linalg.solve(self.q, -0.5 * self.a)


def to_quadratic(
    model: RidgeModel, lambda_floor: float | None = None
) -> QuadraticSurrogate:
    """Convert a degree-2 ridge into the convex -S quadratic form.

    Eigenvalues of q below the floor (default 1e-6 max(1, lambda_max))
    are raised to it; ``convexified`` records whether that happened.
    """
    if model.degree != 2:
        raise ValueError(f"need a degree-2 model, got degree {model.degree}")
    r = model.frame.r
    q = np.zeros((r, r))
    a = np.zeros(r)
    c = 0.0
    for exp, coef in zip(model.exponents, model.coefficients):
        total = sum(exp)
        if total == 0:
            c = -coef
        elif total == 1:
            a[exp.index(1)] = -coef
        elif 2 in exp:
            i = exp.index(2)
            q[i, i] = -coef
        else:
            i = exp.index(1)
            j = exp.index(1, i + 1)
            q[i, j] = q[j, i] = -0.5 * coef
    vals, vecs = np.linalg.eigh(q)
    floor = lambda_floor
    if floor is None:
        floor = 1e-6 * max(1.0, float(vals.max()))
    convexified = bool(np.any(vals < floor))
    if convexified:
        vals = np.maximum(vals, floor)
        q = vecs @ np.diag(vals) @ vecs.T
        q = 0.5 * (q + q.T)
    return QuadraticSurrogate(q=q, a=a, c=c, convexified=convexified)


@dataclass(frozen=True, eq=False)
class ShadowTable:
    """Projected sample coordinates with their objective values."""

    y: np.ndarray
    values: np.ndarray


def shadow_data(frame: Frame, points_scaled: np.ndarray, values: np.ndarray) -> ShadowTable:
    """Scatter data for a shadow plot: active coordinates against values."""
    values = np.asarray(values, dtype=float)
    y = np.atleast_2d(project(frame, points_scaled))
    if y.shape[0] != values.shape[0]:
        raise ValueError("values must be one per sample")
    return ShadowTable(y=y, values=values)
