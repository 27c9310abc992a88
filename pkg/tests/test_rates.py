import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from altiter import geometry as geo
from altiter import maps as mp
from altiter.errors import ParameterError
from altiter.iterate import Harmonic, IterationConfig, iterate_coupled
from altiter.rates import (
    ClosedFormRate, EpsilonGrid, RateTable, check_convergence_transfer, check_domination, check_rate,
    check_rate_transfer, distance_to_fixed_point_series, empirical_rate, step_distances, tabulate_rate,
)

import oracles

E1, E2 = geo.euclidean(1), geo.euclidean(2)
HALF = mp.EuclideanScaling(0.5, (0.0,))


@pytest.fixture(scope="module")
def scaling_run():
    return iterate_coupled(IterationConfig(E1, HALF, [1.0], [1.0], Harmonic(), 60))


def scaling_x_steps(n):
    xs, _ = oracles.scaling_recurrence(n)
    return [float(a - b) for a, b in zip(xs, xs[1:])]


# -- step distances ----------------------------------------------------------------

def test_step_distances_constant_sequence():
    assert np.array_equal(step_distances(np.ones((5, 2)), E2), np.zeros(4))


def test_step_distances_scaling_sequence():
    out = step_distances([[1.0], [0.5], [1 / 3], [0.25]], E1)
    assert np.allclose(out, [0.5, 1 / 6, 1 / 12], rtol=0, atol=1e-15)


def test_step_distances_periodic():
    assert step_distances([[0.0], [1.0], [0.0], [1.0]], E1).tolist() == [1.0, 1.0, 1.0]


def test_step_distances_need_two_points():
    with pytest.raises(ParameterError):
        step_distances([[1.0]], E1)


# -- empirical rates ---------------------------------------------------------------

def test_empirical_rate_examples():
    assert empirical_rate(np.zeros(10), 0.1) == 0
    assert empirical_rate(scaling_x_steps(30), 0.1) == 2
    assert empirical_rate([1.0, 1.0, 1.0], 0.5) is None


def test_empirical_rate_ties_are_violations():
    assert empirical_rate([0.5, 0.1, 0.01], 0.1) == 2
    assert empirical_rate([0.5, 0.1], 0.1) is None


def test_empirical_rate_offset():
    assert empirical_rate([0.5, 0.05, 0.01], 0.1, start=1) == 2


@given(st.lists(st.floats(0, 10), min_size=1, max_size=40), st.floats(1e-6, 5), st.floats(1e-6, 5))
def test_empirical_rate_monotone_in_epsilon(steps, e1, e2):
    lo, hi = sorted((e1, e2))
    r_lo, r_hi = empirical_rate(steps, lo), empirical_rate(steps, hi)
    if r_lo is not None:
        assert r_hi is not None and r_lo >= r_hi


def test_epsilon_grid_validation():
    assert EpsilonGrid().values == (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
    with pytest.raises(ParameterError):
        EpsilonGrid((0.1, 0.1))
    with pytest.raises(ParameterError):
        EpsilonGrid((0.1, -1.0))


# -- rate functions -----------------------------------------------------------------

def test_rate_table_lookup_and_monotonicity():
    phi = RateTable(((0.1, 2), (0.01, 10)))
    assert phi(0.1) == 2 and phi(0.5) == 2 and phi(0.05) == 10 and phi(0.001) is None
    with pytest.raises(ParameterError):
        RateTable(((0.1, 5), (0.01, 3)))


def test_closed_form_rates():
    assert ClosedFormRate.of("power", c=1.0, k=1.0)(0.1) == 10
    assert ClosedFormRate.of("log", c=2.0)(math.e ** -3) == 6
    assert ClosedFormRate.of("constant", n=4)(1e-9) == 4
    with pytest.raises(ParameterError):
        ClosedFormRate.of("power", c=1.0)
    with pytest.raises(ParameterError):
        ClosedFormRate.of("exotic", c=1.0)


def test_check_rate_examples():
    zero = ClosedFormRate.of("constant", n=0)
    assert check_rate(np.zeros(20), zero).passed
    steps = scaling_x_steps(40)
    assert check_rate(steps, RateTable(((0.1, 2),)), EpsilonGrid((0.1,))).passed
    rep = check_rate(steps, zero, EpsilonGrid((0.1,)))
    assert not rep.passed and rep.entries[0].first_violation == 0


def test_check_rate_unchecked_beyond_horizon():
    rep = check_rate(np.full(5, 0.01), ClosedFormRate.of("constant", n=10), EpsilonGrid((0.1,)))
    assert rep.passed and rep.entries[0].status == "unchecked"
    rep = check_rate(np.full(5, 0.01), RateTable(((0.1, 0),)), EpsilonGrid((0.1, 0.01)))
    assert [e.status for e in rep.entries] == ["pass", "unchecked"]


# -- transfer and domination ---------------------------------------------------------

def test_rate_transfer_scaling_slack_factor_two(scaling_run):
    # x-steps 1/((n+1)(n+2)) vs y-steps 2/((n+1)(n+2)) for n >= 1
    n = np.arange(1, 60)
    assert np.allclose(scaling_run.x_steps[1:], 1 / ((n + 1) * (n + 2)), rtol=1e-12, atol=0)
    assert np.allclose(scaling_run.y_steps, 2 / ((n + 1) * (n + 2)), rtol=1e-12, atol=0)
    rep = check_rate_transfer(scaling_run, tol=1e-12)
    assert rep.passed and rep.max_excess < 0


def test_rate_transfer_fixed_point_trivial():
    cfg = IterationConfig(E2, mp.EuclideanRotation(1.0), [0, 0], [0, 0], Harmonic(), 10)
    rep = check_rate_transfer(iterate_coupled(cfg))
    assert rep.passed and rep.max_excess == 0.0
    assert all(e.rate_x == 1 and e.rate_y == 1 for e in rep.entries)


def test_rate_transfer_rotation_quarter_turn():
    cfg = IterationConfig(E2, mp.EuclideanRotation(math.pi / 2, (0, 0)), [1, 0], [0, 1], Harmonic(), 1000)
    rep = check_rate_transfer(iterate_coupled(cfg), tol=1e-12)
    assert rep.passed and rep.violations == 0


def test_rate_transfer_needs_horizon_three():
    cfg = IterationConfig(E1, HALF, [1.0], [1.0], Harmonic(), 2)
    with pytest.raises(ParameterError):
        check_rate_transfer(iterate_coupled(cfg))


def test_domination_examples(scaling_run):
    assert check_domination(scaling_run, pairs=[(3, 3)]).pair_max_excess == 0.0
    traj = scaling_run
    assert geo.distance(E1, traj.x(1), traj.x(2)) == pytest.approx(1 / 6, abs=1e-15)
    assert geo.distance(E1, traj.y(1), traj.y(2)) == pytest.approx(1 / 3, abs=1e-15)
    rep = check_domination(traj, mp.fixed_point_oracle(HALF), pairs=[(1, 2)])
    assert rep.passed and rep.pair_max_excess == pytest.approx(1 / 6 - 1 / 3, abs=1e-15)
    n = np.arange(1, 61)
    assert np.allclose(distance_to_fixed_point_series(traj.xs[1:], E1, [0.0]), 1 / (n + 1), rtol=1e-12)
    assert np.allclose(distance_to_fixed_point_series(traj.ys, E1, [0.0]), 2 / (n + 1), rtol=1e-12)
    assert rep.fixed_point_max_excess < 0


@pytest.mark.parametrize("pairs", [[(0, 1)], [(1, 0)], [(1, 61)]])
def test_domination_rejects_bad_indices(scaling_run, pairs):
    with pytest.raises(ParameterError):
        check_domination(scaling_run, pairs=pairs)


def test_domination_random_pairs_deterministic(scaling_run):
    a = check_domination(scaling_run, pairs=500, seed=3)
    b = check_domination(scaling_run, pairs=500, seed=3)
    assert a == b and a.passed and a.pairs_checked == 500


def test_domination_catches_expansion():
    T = mp.EuclideanAffine(((2, 0), (0, 2)), (0, 0), validate=False)
    traj = iterate_coupled(IterationConfig(E2, T, [0.1, 0], [0, 0.1], Harmonic(), 10))
    rep = check_domination(traj, pairs=100)
    assert not rep.passed


def test_fixed_point_series_examples(scaling_run):
    assert np.array_equal(distance_to_fixed_point_series(np.ones((4, 2)), E2, [1, 1]), np.zeros(4))
    out = distance_to_fixed_point_series(scaling_run.xs[:4], E1, [0.0])
    assert np.allclose(out, [1, 1 / 2, 1 / 3, 1 / 4], rtol=0, atol=1e-15)


def test_rotation_converges_and_transfers():
    cfg = IterationConfig(E2, mp.EuclideanRotation(math.pi / 2, (0, 0)), [1, 0], [0, 1], Harmonic(), 10_000)
    traj = iterate_coupled(cfg)
    series = distance_to_fixed_point_series(traj.xs, E2, [0, 0])
    assert series[-1] < 1e-2
    # quarter turns make the series 4-periodic in shape; its envelope decreases
    blocks = series[-1000:].reshape(-1, 4).max(axis=1)
    assert np.all(np.diff(blocks) < 0)
    rep = check_convergence_transfer(traj, [0, 0], 1e-2)
    assert rep.passed and rep.y_settle is not None and rep.x_settle <= rep.y_settle


def test_tabulated_rate_transfers(scaling_run):
    grid = EpsilonGrid((1e-1, 1e-2, 1e-3))
    phi = RateTable(tuple((e, empirical_rate(scaling_run.y_steps, e, start=1)) for e in grid))
    assert check_rate(scaling_run.y_steps, phi, grid, start=1).passed
    assert check_rate(scaling_run.x_steps[1:], phi, grid, start=1).passed
    assert tabulate_rate(phi, grid) == phi
