"""End-to-end smoke checks for the python bindings."""

import math
import os

import numpy as np
import pytest

import gpform

SCENARIOS = os.environ.get("GPFORM_SCENARIO_DIR", "scenarios")


def scenario_path(name):
    return os.path.join(SCENARIOS, name)


def test_gp_primitives():
    phi = gpform.transition(1.0, 1)
    assert phi.shape == (4, 4)
    assert phi[0, 2] == 1.0  # position picks up velocity over one second

    cov = gpform.gp_cov(1.0, 1.0, 1)
    assert cov[0, 0] == pytest.approx(1.0 / 3.0)
    assert np.allclose(cov, cov.T)

    inv = gpform.gp_cov_inverse(1.0, 1.0, 1)
    assert np.allclose(cov @ inv, np.eye(4), atol=1e-9)


def test_interpolation_endpoints():
    pos0 = np.array([[0.0], [0.0]])
    vel = np.array([[1.0], [0.5]])
    pos1 = pos0 + 2.0 * vel
    p, v, lam, psi = gpform.interpolate_state(0.0, pos0, vel, 2.0, pos1, vel, 1.0)
    assert p == pytest.approx(np.array([[1.0], [0.5]]))
    assert v == pytest.approx(vel)
    assert lam.shape == (4, 4) and psi.shape == (4, 4)


def test_sdf_queries():
    rows = ["....", ".##.", "...."]
    sdf = gpform.sdf_from_ascii(rows, cell_size=0.5)
    d, grad = sdf.query(0.25, 0.25)
    assert d == pytest.approx(0.5 * math.sqrt(2.0))
    with pytest.raises(gpform.OutOfBounds):
        sdf.query(-1.0, 0.0)


def test_assignment_transition():
    old = [[0, 1], [2, 3], [4, 5], [6, 7]]
    new = gpform.assign_transition(old, 8, 2, 4)
    assert new == [[0, 2, 1, 3], [4, 6, 5, 7]]

    padded = gpform.assign_transition([[0, 1], [2, 3], [4, 5], [6, 7]], 7, 2, 4)
    assert padded[1][3] == -1  # virtual slot


def test_pipeline_reproduces_the_paper_plan():
    sc = gpform.load_scenario(scenario_path("corridor6.txt"))
    assert sc.num_robots == 6
    res = gpform.run_pipeline(sc)
    assert res.formations() == [(3, 2), (2, 3), (6, 1)]
    for (lo, hi), (exp_lo, exp_hi) in zip(res.holds(), [(1, 2), (4, 7), (9, 10)]):
        assert lo == pytest.approx(exp_lo, abs=1e-9)
        assert hi == pytest.approx(exp_hi, abs=1e-9)
    assert res.report.converged

    metrics = res.metrics(100)
    assert metrics["min_pairwise_distance"] >= 0.18
    assert metrics["min_obstacle_distance"] >= 0.0
    assert max(metrics["max_formation_error"]) <= 0.06

    pos, vel = res.sample(5.0)
    assert pos.shape == (2, 6)
    assert np.isfinite(pos).all() and np.isfinite(vel).all()


def test_replan_goal_keeps_prefix(tmp_path):
    sc = gpform.parse_scenario(
        "robots = 4\n"
        "formation = 2x2\n"
        "start = 0 0\n"
        "goal = 6 0\n"
        "cell_size = 0.05\n"
        "boxes:\n"
        "  extent -8.5 -2.5 8.5 2.5\n"
        "  box 2.6 0.55 3.4 1.2\n"
        "end\n"
    )
    res = gpform.run_pipeline(sc)
    session = gpform.PlanSession.from_pipeline(res)
    updated = gpform.replan_goal(session, -6.0, 0.0, 7.0)

    before, _ = res.sample(7.0)
    after, _ = updated.sample(7.0)
    assert np.array_equal(before, after)  # frozen prefix

    final, _ = updated.sample(10.0)
    assert final[0].mean() == pytest.approx(-6.0, abs=0.05)

    res.export_to(str(tmp_path), with_polynomials=True)
    assert (tmp_path / "samples.csv").exists()
    assert (tmp_path / "polynomials.txt").exists()


def test_invalid_scenarios_raise():
    with pytest.raises(ValueError):
        gpform.parse_scenario("robots = 0\nstart = 0 0\n")
    with pytest.raises(ValueError):
        gpform.load_scenario("/nonexistent/scenario.txt")
