"""Demo LAA / Wi-Fi coexistence objectives and synthetic test oracles.

The demo model is a self-contained stand-in with the right qualitative
shape for MAC-dominated spectrum sharing; it is not a validated
throughput model and its numbers are illustrative only.  Both networks
contend in slotted CSMA style: a two-class fixed point couples each
class's attempt probability tau to its collision probability p through

    tau = 2 (1 - 2p) / ((1 - 2p)(W + 1) + p W (1 - (2p)^b)),
    p_A = 1 - (1 - tau_A)^(n_A - 1) (1 - tau_B)^(n_B),

where W is the minimum contention window and b the backoff-stage count.
Throughput for a network is its airtime share times its success
probability times bandwidth times a clipped Shannon spectral efficiency;
geometry and propagation parameters enter through an interference-aware
SINR.  Swapping the two networks' MAC parameters swaps the outputs
exactly, which the tests rely on.

The synthetic catalog provides analytically known objective pairs
(planted ridge directions, planted quadratics, a mirror-symmetric pair,
and a quartic with exact derivatives) used to pin down every numerical
stage independently of the demo model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .domain import (
    ParameterSpace,
    ParameterSpec,
    Scenario,
    load_table1,
    scale_to_unit,
)
from .errors import DomainError, EvaluationError
from .gradients import ObjectivePair
from .subspace import Frame, QuadraticSurrogate

FIXED_POINT_TOL = 1e-12
FIXED_POINT_DAMPING = 0.5
FIXED_POINT_MAX_ITER = 10000
SPECTRAL_EFF_FLOOR = 0.5
SPECTRAL_EFF_CAP = 6.0


@dataclass(frozen=True)
class MacConfig:
    """Contention parameters of one node class.

    ``n_nodes`` may be zero so that degenerate single-class setups remain
    expressible; ``backoff_stages`` is real-valued with a small positive
    floor standing in for "no exponential backoff".
    """

    cw_min: float
    backoff_stages: float
    n_nodes: int

    def __post_init__(self):
        if self.cw_min < 1.0:
            raise ValueError(f"cw_min must be >= 1, got {self.cw_min}")
        if self.backoff_stages <= 0.0:
            raise ValueError(f"backoff_stages must be > 0, got {self.backoff_stages}")
        if self.n_nodes < 0:
            raise ValueError(f"n_nodes must be >= 0, got {self.n_nodes}")


@dataclass(frozen=True)
class AccessState:
    """Converged two-class attempt/collision probabilities."""

    tau_a: float
    tau_b: float
    p_a: float
    p_b: float
    iterations: int
    residual: float


def _attempt_probability(p: float, w: float, b: float) -> float:
    """tau(p) for one class; continuous through the p = 1/2 pole."""
    if abs(1.0 - 2.0 * p) < 1e-9:
        return 2.0 / (w + 1.0 + 0.5 * w * b)
    num = 2.0 * (1.0 - 2.0 * p)
    den = (1.0 - 2.0 * p) * (w + 1.0) + p * w * (1.0 - (2.0 * p) ** b)
    return num / den


def access_probabilities(
    cfg_a: MacConfig,
    cfg_b: MacConfig,
    damping: float = FIXED_POINT_DAMPING,
    tol: float = FIXED_POINT_TOL,
    max_iter: int = FIXED_POINT_MAX_ITER,
) -> AccessState:
    """Damped fixed-point solve of the coupled two-class CSMA equations."""
    p_a = p_b = 0.0
    for iteration in range(1, max_iter + 1):
        tau_a = _attempt_probability(p_a, cfg_a.cw_min, cfg_a.backoff_stages)
        tau_b = _attempt_probability(p_b, cfg_b.cw_min, cfg_b.backoff_stages)
        hat_a = 1.0 - (1.0 - tau_a) ** max(cfg_a.n_nodes - 1, 0) * (
            1.0 - tau_b
        ) ** cfg_b.n_nodes
        hat_b = 1.0 - (1.0 - tau_b) ** max(cfg_b.n_nodes - 1, 0) * (
            1.0 - tau_a
        ) ** cfg_a.n_nodes
        residual = max(abs(hat_a - p_a), abs(hat_b - p_b))
        if residual < tol:
            return AccessState(
                tau_a=tau_a,
                tau_b=tau_b,
                p_a=p_a,
                p_b=p_b,
                iterations=iteration,
                residual=residual,
            )
        p_a += damping * (hat_a - p_a)
        p_b += damping * (hat_b - p_b)
    raise EvaluationError(
        f"CSMA fixed point did not converge within {max_iter} iterations "
        f"(residual {residual:.3e})"
    )


def path_loss_db(distance_m: float, k_db: float, alpha: float) -> float:
    """Log-distance path loss k + alpha log10(d), in dB."""
    if distance_m <= 0:
        raise ValueError(f"distance must be positive, got {distance_m}")
    return k_db + alpha * math.log10(distance_m)


def _db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


_DEMO_SPACE: ParameterSpace | None = None


def demo_throughputs(
    theta: np.ndarray,
    scenario: Scenario,
    space: ParameterSpace | None = None,
) -> tuple[float, float]:
    """(S_LAA, S_WiFi) in Mb/s for one 17-parameter operating point.

    Parameter order follows the bundled box: Wi-Fi CW, LAA CW, Wi-Fi
    backoff stages, LAA backoff stages, transmitter separation, link
    distance, antenna heights, shadowing margin, LoS/NLoS path-loss
    intercepts and exponents, antenna gain, noise figure, transmit power
    and bandwidth.  The serving link is LoS with a full shadowing
    margin; the cross-network interferer is NLoS.  Spectral efficiency
    time-shares between the interference-free and fully-interfered
    Shannon rates according to the probability that the other network
    transmits in a slot, with MCS-style floor and cap.
    """
    global _DEMO_SPACE
    if space is None:
        if _DEMO_SPACE is None:
            _DEMO_SPACE = load_table1()[0]
        space = _DEMO_SPACE
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (space.dim,):
        raise DomainError(f"expected {space.dim} parameters, got {theta.shape}")
    low_ok = theta >= space.lower * (1.0 - 1e-9)
    high_ok = theta <= space.upper * (1.0 + 1e-9)
    bad = ~(low_ok & high_ok)
    if bad.any():
        col = int(np.argmax(bad))
        raise DomainError(
            f"parameter {space.specs[col].name!r} = {theta[col]} outside "
            f"[{space.lower[col]}, {space.upper[col]}]"
        )
    (
        wifi_cw,
        laa_cw,
        wifi_stages,
        laa_stages,
        d_tx_tx,
        d_tx_rx,
        h_tx,
        h_rx,
        shadow_db,
        k_los,
        k_nlos,
        alpha_los,
        alpha_nlos,
        gain_dbi,
        noise_figure,
        tx_power,
        bandwidth_mhz,
    ) = theta

    wifi = MacConfig(wifi_cw, wifi_stages, scenario.n_wifi)
    laa = MacConfig(laa_cw, laa_stages, scenario.n_laa)
    state = access_probabilities(wifi, laa)
    tau_w, tau_l = state.tau_a, state.tau_b
    p_w, p_l = state.p_a, state.p_b

    dh = h_tx - h_rx
    d_serve = math.hypot(d_tx_rx, dh)
    d_interf = math.hypot(d_tx_tx, dh)
    pl_serve = path_loss_db(d_serve, k_los, alpha_los) + shadow_db
    pl_interf = path_loss_db(d_interf, k_nlos, alpha_nlos)
    noise_dbm = -174.0 + 10.0 * math.log10(bandwidth_mhz * 1e6) + noise_figure
    signal = _db_to_linear(tx_power + gain_dbi - pl_serve)
    interf = _db_to_linear(tx_power + gain_dbi - pl_interf)
    noise = _db_to_linear(noise_dbm)

    act_w = 1.0 - (1.0 - tau_w) ** scenario.n_wifi
    act_l = 1.0 - (1.0 - tau_l) ** scenario.n_laa

    def _clip(eff: float) -> float:
        return min(max(eff, SPECTRAL_EFF_FLOOR), SPECTRAL_EFF_CAP)

    eff_free = _clip(math.log2(1.0 + signal / noise))
    eff_loaded = _clip(math.log2(1.0 + signal / (noise + interf)))

    def spectral_eff(other_activity: float) -> float:
        return (1.0 - other_activity) * eff_free + other_activity * eff_loaded

    mass_l = scenario.n_laa * tau_l
    mass_w = scenario.n_wifi * tau_w
    any_tx = 1.0 - (1.0 - tau_l) ** scenario.n_laa * (1.0 - tau_w) ** scenario.n_wifi
    total_mass = mass_l + mass_w
    if total_mass > 0.0:
        share_l = mass_l / total_mass * any_tx
        share_w = mass_w / total_mass * any_tx
    else:
        share_l = share_w = 0.0

    s_laa = share_l * (1.0 - p_l) * bandwidth_mhz * spectral_eff(act_w)
    s_wifi = share_w * (1.0 - p_w) * bandwidth_mhz * spectral_eff(act_l)
    return float(s_laa), float(s_wifi)


def make_demo_pair() -> tuple[ObjectivePair, ParameterSpace, Scenario]:
    """The demo objective pair over the bundled 17-parameter box."""
    space, scenario = load_table1()

    def objective_laa(theta: np.ndarray, sc: Scenario) -> float:
        return demo_throughputs(theta, sc, space)[0]

    def objective_wifi(theta: np.ndarray, sc: Scenario) -> float:
        return demo_throughputs(theta, sc, space)[1]

    pair = ObjectivePair(
        objective_l=objective_laa,
        objective_w=objective_wifi,
        name_l="laa",
        name_w="wifi",
    )
    return pair, space, scenario


# ---------------------------------------------------------------------------
# synthetic oracles


@dataclass(frozen=True, eq=False)
class AnalyticObjective:
    """Objective defined directly over scaled coordinates with exact gradient."""

    name: str
    space: ParameterSpace
    fn: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]

    def __call__(self, theta: np.ndarray, scenario: Scenario) -> float:
        return float(self.fn(scale_to_unit(theta, self.space)))

    def gradient_scaled(self, point_scaled: np.ndarray) -> np.ndarray:
        return np.asarray(self.grad(np.asarray(point_scaled, dtype=float)), float)


@dataclass(frozen=True, eq=False)
class SyntheticPair:
    """A catalog entry: objectives plus whatever structure was planted."""

    name: str
    pair: ObjectivePair
    space: ParameterSpace
    scenario: Scenario
    planted_frames: tuple[Frame, Frame] | None = None
    planted_surrogates: tuple[QuadraticSurrogate, QuadraticSurrogate] | None = None
    active_model: dict | None = None


def unit_log_space(m: int) -> ParameterSpace:
    """Box (1/e, e)^m, whose scaling map is exactly theta_tilde = ln theta."""
    specs = tuple(
        ParameterSpec(name=f"x{i + 1}", lower=math.exp(-1.0), upper=math.e, nominal=1.0)
        for i in range(m)
    )
    return ParameterSpace(specs)


def _unit_scenario() -> Scenario:
    return Scenario(1, 1, 1, 1, 1, 1.0, 1.0)


def _normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def _ridge_pair() -> SyntheticPair:
    m = 8
    space = unit_log_space(m)
    w_l = _normalize([3.0, 1.0, 0.0, 2.0, 0.0, 1.0, 0.0, 1.0])
    w_w = _normalize([1.0, 3.0, 2.0, 0.0, 1.0, 0.0, 1.0, 0.0])

    def make(w):
        def fn(x):
            return math.exp(0.5 * float(w @ x))

        def grad(x):
            return 0.5 * math.exp(0.5 * float(w @ x)) * w

        return fn, grad

    fn_l, grad_l = make(w_l)
    fn_w, grad_w = make(w_w)
    pair = ObjectivePair(
        AnalyticObjective("ridge_l", space, fn_l, grad_l),
        AnalyticObjective("ridge_w", space, fn_w, grad_w),
        name_l="ridge_l",
        name_w="ridge_w",
    )
    return SyntheticPair(
        name="ridge",
        pair=pair,
        space=space,
        scenario=_unit_scenario(),
        planted_frames=(Frame(w_l[:, None]), Frame(w_w[:, None])),
    )


def _quadratic_pair() -> SyntheticPair:
    m = 6
    space = unit_log_space(m)
    seedmat = np.array(
        [
            [2.0, 1.0],
            [1.0, 3.0],
            [0.0, 1.0],
            [1.0, 0.0],
            [2.0, 2.0],
            [1.0, 1.0],
        ]
    )
    q, r = np.linalg.qr(seedmat)
    signs = np.sign(np.diag(r))
    basis = q * signs
    e1 = np.array([1.0, 0.0])

    def fn_w(x):
        y = basis.T @ x
        return -float(y @ y)

    def grad_w(x):
        return -2.0 * basis @ (basis.T @ x)

    def fn_l(x):
        y = basis.T @ x - e1
        return -float(y @ y)

    def grad_l(x):
        return -2.0 * basis @ (basis.T @ x - e1)

    pair = ObjectivePair(
        AnalyticObjective("quad_l", space, fn_l, grad_l),
        AnalyticObjective("quad_w", space, fn_w, grad_w),
        name_l="quad_l",
        name_w="quad_w",
    )
    frame = Frame(basis)
    surrogate_l = QuadraticSurrogate(q=np.eye(2), a=np.array([-2.0, 0.0]), c=1.0)
    surrogate_w = QuadraticSurrogate(q=np.eye(2), a=np.zeros(2), c=0.0)
    return SyntheticPair(
        name="quadratic",
        pair=pair,
        space=space,
        scenario=_unit_scenario(),
        planted_frames=(frame, frame),
        planted_surrogates=(surrogate_l, surrogate_w),
    )


def _mirror_pair() -> SyntheticPair:
    m = 4
    space = unit_log_space(m)
    alpha = math.pi / 6.0
    w_l = np.array([math.cos(alpha), math.sin(alpha), 0.0, 0.0])
    w_w = np.array([math.sin(alpha), math.cos(alpha), 0.0, 0.0])

    def make(w):
        def fn(x):
            return float(w @ x) ** 2

        def grad(x):
            return 2.0 * float(w @ x) * w

        return fn, grad

    fn_l, grad_l = make(w_l)
    fn_w, grad_w = make(w_w)
    pair = ObjectivePair(
        AnalyticObjective("mirror_l", space, fn_l, grad_l),
        AnalyticObjective("mirror_w", space, fn_w, grad_w),
        name_l="mirror_l",
        name_w="mirror_w",
    )
    return SyntheticPair(
        name="mirror",
        pair=pair,
        space=space,
        scenario=_unit_scenario(),
        planted_frames=(Frame(w_l[:, None]), Frame(w_w[:, None])),
    )


def _quartic_pair() -> SyntheticPair:
    m = 5
    space = unit_log_space(m)
    basis = np.eye(m)[:, :2]
    c_l = np.array([0.5, 0.2])
    c_w = np.array([-0.4, 0.3])

    def active_value(center):
        def value(y):
            d = np.asarray(y, float) - center
            rr = float(d @ d)
            return -(rr * rr + rr)

        return value

    def active_grad(center):
        def grad(y):
            d = np.asarray(y, float) - center
            rr = float(d @ d)
            return -(4.0 * rr + 2.0) * d

        return grad

    def active_hess(center):
        def hess(y):
            d = np.asarray(y, float) - center
            rr = float(d @ d)
            return -((4.0 * rr + 2.0) * np.eye(2) + 8.0 * np.outer(d, d))

        return hess

    def full(center):
        def fn(x):
            return active_value(center)(x[:2])

        def grad(x):
            g = np.zeros(m)
            g[:2] = active_grad(center)(x[:2])
            return g

        return fn, grad

    fn_l, grad_l = full(c_l)
    fn_w, grad_w = full(c_w)
    pair = ObjectivePair(
        AnalyticObjective("quartic_l", space, fn_l, grad_l),
        AnalyticObjective("quartic_w", space, fn_w, grad_w),
        name_l="quartic_l",
        name_w="quartic_w",
    )
    frame = Frame(basis)
    active_model = {
        "value_l": active_value(c_l),
        "grad_l": active_grad(c_l),
        "hess_l": active_hess(c_l),
        "value_w": active_value(c_w),
        "grad_w": active_grad(c_w),
        "hess_w": active_hess(c_w),
        "center_l": c_l,
        "center_w": c_w,
    }
    return SyntheticPair(
        name="quartic",
        pair=pair,
        space=space,
        scenario=_unit_scenario(),
        planted_frames=(frame, frame),
        active_model=active_model,
    )


def synthetic_oracles() -> dict[str, SyntheticPair]:
    """Catalog of analytically known objective pairs, keyed by name."""
    pairs = [_ridge_pair(), _quadratic_pair(), _mirror_pair(), _quartic_pair()]
    return {p.name: p for p in pairs}
