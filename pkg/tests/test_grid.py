import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nltachyon.grid import (
    Grid,
    GridFileError,
    GridFunction,
    StepProfile,
    TailMismatchError,
    derivative,
    derivative_array,
    fd_weights,
    read_csv,
    sup_norm,
    write_csv,
)


def test_grid_from_range_hits_endpoints():
    g = Grid.from_range(-20.0, 20.0, 0.05)
    assert g.n == 801
    assert g.t[0] == -20.0
    assert g.t_max == pytest.approx(20.0, abs=1e-12)
    assert g.midpoint == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("args", [(0.0, 0.0, 10), (0.0, -0.1, 10), (0.0, 0.1, 2)])
def test_grid_rejects_bad_geometry(args):
    with pytest.raises(ValueError):
        Grid(*args)


def test_tail_mismatch_is_rejected():
    g = Grid.from_range(-2, 2, 0.1)
    with pytest.raises(TailMismatchError):
        GridFunction(g, np.tanh(g.t), -1.0, 1.0)
    # relaxed tolerance accepts the same data
    f = GridFunction(g, np.tanh(g.t), -1.0, 1.0, tail_tol=0.1)
    assert f.jump == 2.0


def test_values_are_read_only():
    f = GridFunction.constant(Grid(0.0, 1.0, 5), 2.0)
    with pytest.raises(ValueError):
        f.values[0] = 1.0


def test_step_profile_midpoint_value():
    s = StepProfile(2.0, at=1.0)
    assert list(s(np.array([0.0, 1.0, 2.0]))) == [0.0, 1.0, 2.0]
    f = s.sample(Grid.from_range(-2, 4, 0.5), base=-1.0)
    assert (f.tail_left, f.tail_right) == (-1.0, 1.0)


def test_arithmetic_acts_on_tails():
    g = Grid.from_range(-1, 1, 0.5)
    a = GridFunction.constant(g, 2.0)
    b = GridFunction(g, np.full(g.n, 3.0), 3.0, 3.0)
    c = (a * b - 1.0) / 5.0
    assert (c.tail_left, c.tail_right) == (1.0, 1.0)
    assert np.allclose(c.values, 1.0)
    assert (-a).tail_left == -2.0
    assert (a**2).tail_right == 4.0
    with pytest.raises(ValueError):
        a + GridFunction.constant(Grid.from_range(-1, 1, 0.25), 1.0)


def test_call_uses_tails_outside_window():
    g = Grid.from_range(0, 1, 0.5)
    f = GridFunction(g, [0.0, 0.5, 1.0], 0.0, 1.0, tail_tol=math.inf)
    assert f(-3.0) == 0.0 and f(9.0) == 1.0 and f(0.25) == pytest.approx(0.25)


def test_fd_weights_reproduce_textbook_stencils():
    assert np.allclose(fd_weights([-1, 0, 1], 2), [1, -2, 1])
    assert np.allclose(fd_weights([-2, -1, 0, 1, 2], 1), [1 / 12, -2 / 3, 0, 2 / 3, -1 / 12])


@pytest.mark.parametrize("order", [1, 2])
def test_derivative_fourth_order_convergence(order):
    errs = []
    for dt in (0.1, 0.05):
        t = np.arange(-3, 3 + dt / 2, dt)
        exact = np.cos(t) if order == 1 else -np.sin(t)
        errs.append(np.max(np.abs(derivative_array(np.sin(t), dt, order) - exact)))
    assert errs[0] / errs[1] > 12  # ~16 for fourth order


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=5, max_size=5), st.floats(0.01, 0.5))
def test_derivative_exact_on_quartics(coeffs, dt):
    t = np.arange(12) * dt - 0.3
    p = np.polynomial.Polynomial(coeffs)
    for order in (1, 2):
        got = derivative_array(p(t), dt, order)
        scale = 1 + np.max(np.abs(p.deriv(order)(t)))
        assert np.max(np.abs(got - p.deriv(order)(t))) <= 1e-7 * scale / dt**order


def test_derivative_has_zero_tails_and_sup_norm_includes_tails():
    g = Grid.from_range(-5, 5, 0.1)
    f = GridFunction(g, np.zeros(g.n), 0.0, 0.0)
    d = derivative(f)
    assert d.tail_left == 0.0 and math.isinf(d.tail_tol)
    assert sup_norm(GridFunction(g, np.zeros(g.n), 0.0, 3.0, tail_tol=math.inf)) == 3.0


def test_csv_round_trip(tmp_path):
    g = Grid.from_range(-2, 2, 0.25)
    f = GridFunction(g, np.tanh(4 * g.t), -1.0, 1.0, tail_tol=1e-2)
    write_csv(f, tmp_path / "f.csv")
    back = read_csv(tmp_path / "f.csv", tail_tol=1e-2)
    assert back.grid == g
    assert np.array_equal(back.values, f.values)
    assert (back.tail_left, back.tail_right) == (-1.0, 1.0)


def test_csv_reports_malformed_row(tmp_path):
    g = Grid.from_range(0, 1, 0.5)
    write_csv(GridFunction.constant(g, 1.0), tmp_path / "f.csv")
    lines = (tmp_path / "f.csv").read_text().splitlines()
    lines[2] = "0.5,banana"
    (tmp_path / "f.csv").write_text("\n".join(lines) + "\n")
    with pytest.raises(GridFileError, match=r"f\.csv:3"):
        read_csv(tmp_path / "f.csv")


def test_derivative_convergence_rate_at_least_three_and_a_half():
    errs = []
    for dt in (0.1, 0.05, 0.025):
        t = np.arange(-3, 3 + dt / 2, dt)
        errs.append(np.max(np.abs(derivative_array(np.exp(np.sin(t)), dt, 1) - np.cos(t) * np.exp(np.sin(t)))))
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(rates >= 3.5)


def test_nested_first_derivative_matches_second():
    for dt in (0.1, 0.05):
        g = Grid.from_range(-4, 4, dt)
        f = GridFunction(g, np.exp(-g.t**2), 0.0, 0.0, tail_tol=1e-6)
        nested = derivative(derivative(f, 1), 1).values[10:-10]
        direct = derivative(f, 2).values[10:-10]
        assert np.max(np.abs(nested - direct)) < 10 * dt**2
