"""Scaling map and parameter-space behavior.

Expected values here are hand-derived from the definition
theta_tilde_i = 2 (ln theta_i - ln mid_i) / (ln u_i - ln l_i) with
mid_i the geometric midpoint sqrt(l_i u_i).
"""

import json
import math

import numpy as np
import pytest

from paretotrace.domain import (
    ParameterSpace,
    ParameterSpec,
    Scenario,
    load_parameter_space,
    load_table1,
    sample_uniform,
    scale_to_unit,
    table1_path,
    unscale_from_unit,
)
from paretotrace.errors import DomainError


def small_space():
    return ParameterSpace(
        (
            ParameterSpec("cw", 8.0, 1024.0, 516.0),
            ParameterSpec("gain", 1e-4, 5.0, 2.5),
            ParameterSpec("power", 18.0, 23.0, 20.5),
        )
    )


def test_bounds_map_to_cube_faces():
    space = small_space()
    low = scale_to_unit(np.array([8.0, 1e-4, 18.0]), space)
    high = scale_to_unit(np.array([1024.0, 5.0, 23.0]), space)
    assert np.allclose(low, -1.0, atol=1e-12)
    assert np.allclose(high, 1.0, atol=1e-12)


def test_geometric_midpoint_maps_to_origin():
    # sqrt(8 * 1024) = sqrt(8192) = 90.50966799..., the log midpoint
    space = small_space()
    mid = np.sqrt(np.array([8.0 * 1024.0, 1e-4 * 5.0, 18.0 * 23.0]))
    assert abs(mid[0] - 90.50966799187809) < 1e-10
    assert np.max(np.abs(scale_to_unit(mid, space))) < 1e-12


def test_round_trip_is_identity():
    space = small_space()
    rng = np.random.default_rng(3)
    pts = rng.uniform(-1.0, 1.0, size=(100, 3))
    back = scale_to_unit(unscale_from_unit(pts, space), space)
    assert np.max(np.abs(back - pts)) < 1e-12
    theta = unscale_from_unit(pts, space)
    again = unscale_from_unit(scale_to_unit(theta, space), space)
    assert np.max(np.abs(np.log(again) - np.log(theta))) < 1e-12


def test_scaling_is_monotone_per_coordinate():
    space = small_space()
    grid = np.linspace(-1.0, 1.0, 33)
    for j in range(3):
        pts = np.zeros((33, 3))
        pts[:, j] = grid
        theta = unscale_from_unit(pts, space)
        assert np.all(np.diff(theta[:, j]) > 0)


def test_out_of_box_value_names_parameter():
    space = small_space()
    with pytest.raises(DomainError, match="gain"):
        scale_to_unit(np.array([100.0, 6.0, 20.0]), space)
    with pytest.raises(DomainError, match="power"):
        scale_to_unit(np.array([100.0, 2.0, -1.0]), space)


def test_unscale_rejects_points_past_clamp_tolerance():
    space = small_space()
    with pytest.raises(DomainError, match="cw"):
        unscale_from_unit(np.array([1.1, 0.0, 0.0]), space)
    # within the clamp tolerance the point is folded onto the face
    edge = unscale_from_unit(np.array([1.0 + 1e-10, 0.0, 0.0]), space)
    assert abs(edge[0] - 1024.0) < 1e-9 * 1024.0
    # a finite-difference overshoot is allowed when the caller says so
    fd = unscale_from_unit(np.array([1.0 + 1e-6, 0.0, 0.0]), space, clamp_tol=2e-6)
    assert abs(fd[0] - 1024.0) < 1e-9 * 1024.0


def test_sampling_is_deterministic_and_fills_the_cube():
    space = small_space()
    a = sample_uniform(space, 500, seed=11)
    b = sample_uniform(space, 500, seed=11)
    c = sample_uniform(space, 500, seed=12)
    assert np.array_equal(a.scaled, b.scaled)
    assert not np.array_equal(a.scaled, c.scaled)
    assert a.scaled.min() >= -1.0 and a.scaled.max() <= 1.0
    # each column mean is within 3 sigma of 0, sigma = (1/sqrt(3)) / sqrt(n)
    bound = 3.0 / math.sqrt(3.0 * 500)
    assert np.max(np.abs(a.scaled.mean(axis=0))) < bound
    assert np.max(np.abs(scale_to_unit(a.original, space) - a.scaled)) < 1e-12


def test_invalid_specs_rejected():
    with pytest.raises(ValueError):
        ParameterSpec("bad", -1.0, 2.0, 1.0)
    with pytest.raises(ValueError):
        ParameterSpec("bad", 2.0, 1.0, 1.5)
    with pytest.raises(ValueError):
        ParameterSpec("bad", 1.0, 2.0, 5.0)
    with pytest.raises(ValueError):
        Scenario(-1, 1, 1, 1, 1, 10.0, 10.0)
    with pytest.raises(ValueError):
        Scenario(1, 1, 1, 1, 0, 10.0, 10.0)
    with pytest.raises(ValueError):
        sample_uniform(small_space(), 0, seed=1)


def test_bundled_box_is_well_formed():
    space, scenario = load_table1()
    assert space.dim == 17
    assert scenario.n_laa == 6 and scenario.n_wifi == 6
    assert scenario.n_channels == 1
    assert scenario.width_m == 120.0 and scenario.height_m == 80.0
    # nominal point lies inside the cube
    nominal_scaled = scale_to_unit(space.nominal, space)
    assert np.all(np.abs(nominal_scaled) <= 1.0)
    # scaling identities: M diag = 2/(ln u - ln l), b = -M log-midpoint
    m_expect = 2.0 / (np.log(space.upper) - np.log(space.lower))
    b_expect = -m_expect * 0.5 * (np.log(space.lower) + np.log(space.upper))
    assert np.max(np.abs(space.m_diag - m_expect)) < 1e-15
    assert np.max(np.abs(space.b - b_expect)) < 1e-12
    # contention windows span 8..1024, backoff floor is 1e-4
    assert space.lower[0] == 8.0 and space.upper[0] == 1024.0
    assert space.lower[2] == 1e-4 and space.upper[2] == 8.0


def test_space_file_round_trip(tmp_path):
    src = json.loads(table1_path().read_text())
    path = tmp_path / "space.json"
    path.write_text(json.dumps(src))
    space, scenario = load_parameter_space(path)
    bundled_space, bundled_scenario = load_table1()
    assert space.names == bundled_space.names
    assert np.array_equal(space.lower, bundled_space.lower)
    assert scenario == bundled_scenario
    (tmp_path / "broken.json").write_text('{"parameters": []}')
    with pytest.raises(ValueError):
        load_parameter_space(tmp_path / "broken.json")
