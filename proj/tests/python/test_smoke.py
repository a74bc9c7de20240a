import json
import math

import numpy as np
import pytest

import cylflow as cf


@pytest.fixture(scope="module")
def grid():
    return cf.sheet_grid(R=6.0, ny=33, ntheta=8)


def sheet_values(grid, fn):
    ny, nt = grid.ny, grid.ntheta
    out = np.empty((ny, ny, nt))
    for j1 in range(ny):
        for j2 in range(ny):
            for t in range(nt):
                out[j1, j2, t] = fn(grid.y(j1), grid.y(j2), grid.theta(t))
    return out


def test_round_sheet_is_stationary(grid):
    v = np.full((grid.ny, grid.ny, grid.ntheta), cf.SQRT2)
    rhs = cf.evolution_rhs(grid, v)
    assert np.max(np.abs(rhs)) < 1e-12


def test_constant_radius_curvature(grid):
    v = np.full((grid.ny, grid.ny, grid.ntheta), 1.7)
    H = cf.mean_curvature(grid, v)
    assert np.allclose(H, 1.0 / 1.7, atol=1e-12)


def test_neutral_mode_is_annihilated(grid):
    u = sheet_values(grid, lambda y1, y2, th: y1 * y1 - 2.0)
    lu = cf.ou_apply(grid, u)
    assert np.max(np.abs(lu)) <= 10.0 * grid.hy**2


def test_mode_state_projection(grid):
    diag = cf.SheetDiagnostics(grid, 9.0)
    u = sheet_values(grid, lambda y1, y2, th: y1 * y1 - 2.0)
    ms = diag.mode_state(grid, u, -10.0)
    assert ms["alpha"][0] == pytest.approx(1.0, rel=1e-6)
    assert abs(ms["alpha"][2]) < 1e-8
    assert ms["Uplus"] <= 1e-10 * ms["U0"]


def test_gaussian_area_of_cylinder(grid):
    v = np.full((grid.ny, grid.ny, grid.ntheta), cf.SQRT2)
    interior, tail, total = cf.gaussian_area(grid, v)
    assert total == pytest.approx(cf.GAUSSIAN_AREA_CYLINDER, rel=1e-5)


def test_cutoff_shape():
    assert cf.chi(0.4) == 1.0
    assert cf.chi(1.1) == 0.0
    assert cf.chi(0.75) == pytest.approx(0.5)


def test_mode_quantization():
    tau0 = -1e6
    c = 1.0 / (math.sqrt(8.0) * tau0)
    traj = cf.integrate_modes(0.0, c, 0.0, tau0, -100.0)
    q = traj["quantization"]
    assert q["rank"] == 1
    assert q["snap_distance"] <= 0.02
    assert q["eigs_snapped"][0] == pytest.approx(cf.QUANTIZED_EIGENVALUE)


def test_phase_plane_zeros():
    assert cf.phase_vector_field(0.5, 0.0) == [0.0, 0.0]
    assert cf.phase_vector_field(1.0, 1.0) == [0.0, 0.0]


def test_shrinker_profile():
    p = cf.solve_shrinker(9.0)
    assert abs(p["endpoint"] - 9.0) <= 1e-7
    assert p["residual_fd"] <= 1e-8
    assert math.sqrt(2.0) < p["waist"] < 2.0


def test_bowl_profile():
    p = cf.solve_bowl(1.0 / math.sqrt(2.0))
    assert p["residual_fd"] <= 1e-8


def test_run_experiment(tmp_path):
    config = {
        "scenario": "cylinder",
        "tau0": -50.0,
        "tau1": -49.0,
        "grid": {"R": 5.0, "ny": 33, "ntheta": 8},
        "sample_stride": 0.25,
        "outputs": {"dir": str(tmp_path)},
    }
    passed, report = cf.run_experiment(json.dumps(config))
    assert passed
    rep = json.loads(report)
    assert rep["validators"]["f_monotone"]["passed"]
    assert (tmp_path / "history.csv").exists()
