import numpy as np
import pytest

import fabopt


def test_brush_properties():
    b = fabopt.Brush("circle:13")
    assert b.size == 13
    assert b.shape == "circle"
    assert b.footprint.sum() == 137
    assert fabopt.brush_width_for_rule(80, 10) == 10


def test_bad_brush_raises():
    with pytest.raises(Exception):
        fabopt.Brush("hexagon:3")


def test_generate_is_feasible_and_deterministic():
    b = fabopt.Brush("circle:5")
    theta = fabopt.random_reward(40, 48, 3)
    x = fabopt.generate(theta, b)
    assert x.shape == (40, 48)
    assert x.dtype == np.int8
    assert set(np.unique(x)) <= {-1, 1}
    assert fabopt.is_feasible(x, b)
    assert fabopt.minimum_length_scale(x, "circle") >= 5
    np.testing.assert_array_equal(x, fabopt.generate(theta, b))


def test_generate_reproduces_feasible_design():
    b = fabopt.Brush("notched:4")
    x = fabopt.generate(fabopt.random_reward(32, 32, 9), b)
    np.testing.assert_array_equal(fabopt.generate(x.astype(float), b), x)


def test_infeasible_design_detected():
    x = -np.ones((20, 20), dtype=np.int8)
    x[10, 10] = 1
    assert not fabopt.is_feasible(x, fabopt.Brush("circle:5"))


def test_non_binary_design_rejected():
    with pytest.raises(Exception):
        fabopt.is_feasible(np.zeros((5, 5), dtype=np.int8), fabopt.Brush("circle:3"))


def test_transform_range():
    t = fabopt.transform(np.random.default_rng(0).normal(size=(16, 16)), fabopt.Brush("circle:3"))
    assert t.shape == (16, 16)
    assert np.all(np.abs(t) <= 1.0)


def test_outline_single_pixel():
    x = -np.ones((3, 3), dtype=np.int8)
    x[1, 1] = 1
    loops = fabopt.outline(x, 20.0)["loops"]
    assert len(loops) == 1
    assert len(loops[0]["vertices"]) == 4


def test_evaluate_bend():
    assert "bend" in fabopt.problem_names()
    rows, cols = fabopt.problem_shape("bend", 20.0)
    assert (rows, cols) == (80, 80)
    x = fabopt.generate(fabopt.random_reward(rows, cols, 0), fabopt.Brush("circle:5"))
    ev = fabopt.evaluate("bend", x, 20.0, with_gradient=True)
    assert np.isfinite(ev["loss"]) and ev["loss"] > 0
    assert ev["gradient"].shape == (rows, cols)
    assert all(abs(v["s"]) <= 1.05 for v in ev["s"])


def test_optimize_two_steps():
    seen = []
    r = fabopt.optimize("bend", fabopt.Brush("circle:5"), 20.0, budget=1, seed=1, on_step=lambda s: seen.append(s["step"]))
    assert seen == [0, 1]
    assert not r["failed"]
    assert all(s["feasible"] for s in r["steps"])
