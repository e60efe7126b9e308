"""Monte Carlo gradient sampling and the active-subspace spectral estimate.

For an objective S over the scaled cube, the matrix

    C = E[ grad S grad S^T ]

is estimated by averaging outer products of forward-difference gradients
at uniform samples.  Its leading eigenvectors span the directions along
which S moves most, and eigenvalue lambda_i equals the mean squared
directional derivative along eigenvector w_i.

Forward differences perturb one scaled coordinate at a time, so a batch
of N samples costs exactly N (m + 1) objective evaluations when the base
values are not supplied and N m when they are.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .domain import ParameterSpace, SampleSet, Scenario, unscale_from_unit
from .errors import EvaluationError

# (theta_original, scenario) -> float
ObjectiveFn = Callable[[np.ndarray, Scenario], float]

DEFAULT_STEP = 1e-6


@dataclass(frozen=True)
class ObjectivePair:
    """Two competing objectives evaluated over the same box.

    ``objective_l`` is the one favored at trace parameter t = 1 and
    ``objective_w`` the one favored at t = 0.
    """

    objective_l: ObjectiveFn
    objective_w: ObjectiveFn
    name_l: str = "L"
    name_w: str = "W"


@dataclass(frozen=True, eq=False)
class GradientSet:
    """Gradients (n, m) in scaled coordinates plus the sampling metadata."""

    gradients: np.ndarray
    base_values: np.ndarray
    h: float
    seed: int | None = None

    @property
    def n(self) -> int:
        return self.gradients.shape[0]


@dataclass(frozen=True, eq=False)
class SpectralEstimate:
    """Eigendecomposition of the estimated C matrix.

    Eigenvalues are sorted descending; eigenvector columns are sign
    normalized so the largest-magnitude entry of each is positive.
    """

    c_matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    n_samples: int
    h: float
    seed: int | None = None


def _check_value(value: float, sample_index=None, coordinate=None) -> float:
    value = float(value)
    if not np.isfinite(value):
        raise EvaluationError(
            f"objective returned non-finite value {value}",
            sample_index=sample_index,
            coordinate=coordinate,
        )
    return value


def fd_gradient(
    objective: ObjectiveFn,
    point_scaled: np.ndarray,
    h: float,
    space: ParameterSpace,
    scenario: Scenario,
    base_value: float | None = None,
    sample_index: int | None = None,
) -> np.ndarray:
    """Forward-difference gradient of the objective in scaled coordinates.

    The point must lie in the cube; perturbed points may overshoot a face
    by h and are folded back by the inverse scaling, which is what makes
    one-sided differences usable on the boundary.
    """
    if h <= 0:
        raise ValueError(f"step must be positive, got {h}")
    point_scaled = np.asarray(point_scaled, dtype=float)
    m = space.dim
    if base_value is None:
        theta = unscale_from_unit(point_scaled, space)
        base_value = _check_value(objective(theta, scenario), sample_index)
    perturbed = np.repeat(point_scaled[None, :], m, axis=0)
    perturbed[np.arange(m), np.arange(m)] += h
    thetas = unscale_from_unit(perturbed, space, clamp_tol=h + 1e-9)
    grad = np.empty(m)
    for j in range(m):
        value = _check_value(objective(thetas[j], scenario), sample_index, j)
        grad[j] = (value - base_value) / h
    return grad


def analytic_gradient(
    objective: ObjectiveFn,
    point_scaled: np.ndarray,
    h: float,
    space: ParameterSpace,
    scenario: Scenario,
    base_value: float | None = None,
    sample_index: int | None = None,
) -> np.ndarray:
    """Drop-in replacement for :func:`fd_gradient` using an exact gradient.

    The objective must expose ``gradient_scaled(point_scaled)``; h is
    accepted and ignored so the two estimators are interchangeable.
    """
    fn = getattr(objective, "gradient_scaled", None)
    if fn is None:
        raise EvaluationError(
            "objective has no gradient_scaled attribute; use fd_gradient",
            sample_index=sample_index,
        )
    grad = np.asarray(fn(np.asarray(point_scaled, dtype=float)), dtype=float)
    if grad.shape != (space.dim,) or not np.all(np.isfinite(grad)):
        raise EvaluationError(
            "gradient_scaled returned a malformed gradient",
            sample_index=sample_index,
        )
    return grad


def evaluate_objective(
    objective: ObjectiveFn,
    samples: SampleSet,
    scenario: Scenario,
    threads: int = 1,
) -> np.ndarray:
    """Objective values at the original sample coordinates, one per row."""

    def one(i: int) -> float:
        return _check_value(objective(samples.original[i], scenario), i)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return np.array(list(pool.map(one, range(samples.n))))
    return np.array([one(i) for i in range(samples.n)])


def sample_gradients(
    objective: ObjectiveFn,
    samples: SampleSet,
    h: float,
    space: ParameterSpace,
    scenario: Scenario,
    base_values: np.ndarray | None = None,
    gradient_fn=fd_gradient,
    threads: int = 1,
    seed: int | None = None,
) -> GradientSet:
    """Gradient estimates at every sample, reusing base values if given."""
    if base_values is None:
        base_values = evaluate_objective(objective, samples, scenario, threads)
    base_values = np.asarray(base_values, dtype=float)
    if base_values.shape != (samples.n,):
        raise ValueError("base_values must match the number of samples")

    def one(i: int) -> np.ndarray:
        return gradient_fn(
            objective,
            samples.scaled[i],
            h,
            space,
            scenario,
            base_value=base_values[i],
            sample_index=i,
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, range(samples.n)))
    else:
        rows = [one(i) for i in range(samples.n)]
    return GradientSet(
        gradients=np.asarray(rows), base_values=base_values, h=h, seed=seed
    )


def spectral_from_gradients(
    gradients: GradientSet | np.ndarray,
    h: float | None = None,
    seed: int | None = None,
) -> SpectralEstimate:
    """Eigendecomposition of C = (1/N) sum_k g_k g_k^T."""
    if isinstance(gradients, GradientSet):
        if h is None:
            h = gradients.h
        if seed is None:
            seed = gradients.seed
        grads = gradients.gradients
    else:
        grads = np.asarray(gradients, dtype=float)
    n = grads.shape[0]
    c = grads.T @ grads / n
    c = 0.5 * (c + c.T)
    vals, vecs = np.linalg.eigh(c)
    # eigh returns ascending order; flip to descending.  Ties keep the
    # solver's relative order.
    vals = vals[::-1].copy()
    vecs = vecs[:, ::-1].copy()
    for j in range(vecs.shape[1]):
        piv = np.argmax(np.abs(vecs[:, j]))
        if vecs[piv, j] < 0:
            vecs[:, j] = -vecs[:, j]
    return SpectralEstimate(
        c_matrix=c,
        eigenvalues=vals,
        eigenvectors=vecs,
        n_samples=n,
        h=float(h) if h is not None else float("nan"),
        seed=seed,
    )


def estimate_C(
    objective: ObjectiveFn,
    samples: SampleSet,
    h: float,
    space: ParameterSpace,
    scenario: Scenario,
    base_values: np.ndarray | None = None,
    gradient_fn=fd_gradient,
    threads: int = 1,
    seed: int | None = None,
) -> SpectralEstimate:
    """Monte Carlo active-subspace estimate for one objective."""
    grads = sample_gradients(
        objective,
        samples,
        h,
        space,
        scenario,
        base_values=base_values,
        gradient_fn=gradient_fn,
        threads=threads,
        seed=seed,
    )
    return spectral_from_gradients(grads)


class CountingObjective:
    """Wrapper that counts evaluations; forwards gradient_scaled if present."""

    def __init__(self, objective: ObjectiveFn):
        self._objective = objective
        self.calls = 0
        fn = getattr(objective, "gradient_scaled", None)
        if fn is not None:
            self.gradient_scaled = fn

    def __call__(self, theta: np.ndarray, scenario: Scenario) -> float:
        self.calls += 1
        return self._objective(theta, scenario)
