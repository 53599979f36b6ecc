"""End-to-end smoke tests for the python bindings."""

import json
import math

import numpy as np
import pytest

import divopt


@pytest.fixture(scope="module")
def model():
    return divopt.ModelParams(r=0.05, sigma=0.1, rho=0.0,
                              drift=divopt.DriftSpec.ou(k=0.5, mu_bar=0.15, sigma_tilde=0.3))


@pytest.fixture(scope="module")
def grid(model):
    spec = divopt.GridSpec(x_max=3.0, mu_min=-2.0, mu_max=2.0, nx=41, nmu=41)
    return divopt.build_grid(spec, model)


@pytest.fixture(scope="module")
def solution(model, grid):
    K = divopt.default_penalization(grid)
    value, policy, report = divopt.policy_iteration(model, grid, K)
    return value, policy, report, K


def test_model_basics(model):
    assert model.kappa(0.15) == pytest.approx(0.0)
    assert model.kappa(0.0) == pytest.approx(0.075)
    assert model.sigma_tilde(1.0) == 0.3
    ok, checks = divopt.validate_assumptions(model, -3.0, 3.0)
    assert ok
    assert any(c["name"] == "mean_reversion" for c in checks)


def test_closed_form_oracles():
    p = divopt.DeterministicParams(r=0.05, k=0.5, mu_bar=0.15)
    assert divopt.tau0(p, -0.15) == pytest.approx(math.log(2.0) / 0.5)
    assert divopt.x_b(p, -0.15) == pytest.approx(0.0920558458, abs=1e-9)
    assert divopt.deterministic_value(p, 1.0, 0.15) == pytest.approx(4.0)
    assert divopt.deterministic_mu_star(p) == pytest.approx(-1.43076, abs=1e-4)


def test_policy_iteration_and_boundaries(model, grid, solution):
    value, policy, report, K = solution
    assert report.converged
    assert value.shape == (grid.nmu, grid.nx)
    assert (value >= -1e-9).all()
    assert np.all(np.diff(value, axis=1) >= -1e-7)  # nondecreasing in x

    boundaries = divopt.extract_boundaries(policy, grid, K)
    assert boundaries.mu_star is not None and boundaries.mu_star < 0.0
    assert divopt.classify_point(boundaries, 0.0, boundaries.mu_star) == "liquidate"

    mus = np.asarray(boundaries.mus)
    lower = np.asarray(boundaries.lower)
    keep = ~np.isnan(lower)
    assert (lower[keep & (mus >= 0.1)] == 0.0).all()


def test_monte_carlo_matches_grid(model, grid, solution):
    value, policy, report, K = solution
    boundaries = divopt.extract_boundaries(policy, grid, K)
    cfg = divopt.SimConfig(n_paths=4000, dt=0.005, seed=3)
    est = divopt.simulate_policy(model, boundaries, 0.5, 0.15, cfg)
    grid_v = divopt.interpolate(value, grid, 0.5, 0.15)
    assert est.mean == pytest.approx(grid_v, abs=3.0 * est.std_error + 0.2)
    repeat = divopt.simulate_policy(model, boundaries, 0.5, 0.15, cfg)
    assert repeat.mean == est.mean


def test_credit_line_extension(model):
    spec = divopt.GridSpec(x_max=2.5, mu_min=-1.5, mu_max=1.5, nx=61, nmu=41, x_min=-0.5)
    g = divopt.build_grid(spec, model)
    credit = divopt.CreditLineSpec(rho_minus=0.01, x_lower=lambda mu: -0.5)
    out = divopt.solve_credit_line(model, g, credit, K=100.0 / g.dx)
    assert out["report"].converged
    assert out["value"].shape == (g.nmu, g.nx)


def test_cli_round_trip(tmp_path):
    cfg = {
        "mode": "base",
        "model": {"r": 0.05, "sigma": 0.1, "rho": 0.0},
        "drift": {"kind": "ou", "k": 0.5, "mu_bar": 0.15, "sigma_tilde": 0.3},
        "grid": {"x_max": 3.0, "mu_min": -2.0, "mu_max": 2.0, "nx": 31, "nmu": 31},
        "solver": {"K": "auto", "tau": 0.0, "max_iter": 200},
    }
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(cfg))
    out_dir = tmp_path / "out"
    assert divopt.run_config_file(str(cfg_path), str(out_dir)) == 0
    header = (out_dir / "boundaries.csv").read_text().splitlines()[0]
    assert header == "mu,divLower,divUpper"
    assert (out_dir / "value.csv").exists()
    assert (out_dir / "report.json").exists()
