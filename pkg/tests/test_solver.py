"""Transportation solver: frozen values, certificates, oracles, duals."""

from fractions import Fraction

import numpy as np
import pytest

from otlab import (
    Coupling,
    CouplingError,
    DiscreteMeasure,
    Euclidean,
    EuclideanPoint,
    Finite,
    FinitePoint,
    IntervalPoint,
    Product,
    ProductPoint,
    SolverStallError,
    check_cyclical_monotonicity,
    coupling_cost,
    kr_dual,
    make_rng,
    powered_distance,
    random_coupling,
    random_measure,
    solve_wasserstein,
    validate_coupling,
)

from oracles import exhaustive_min_cost, linprog_transport_cost


def interval_measure(space, pairs):
    return DiscreteMeasure(space, tuple((IntervalPoint(t), m) for t, m in pairs))


def test_two_atom_crossing_hand_value(unit_interval):
    # quantile integral: |0 - 1/2| on [0, 1/4), |1/4 - 1/2| on [1/4, 1/2),
    # |1/4 - 1| on [1/2, 1) gives 9/16
    mu = interval_measure(
        unit_interval, ((Fraction(0), Fraction(1, 4)), (Fraction(1, 4), Fraction(3, 4)))
    )
    nu = interval_measure(
        unit_interval, ((Fraction(1, 2), Fraction(1, 2)), (Fraction(1), Fraction(1, 2)))
    )
    result = solve_wasserstein(mu, nu, p=1)
    assert result.powered_cost == Fraction(9, 16)
    assert isinstance(result.powered_cost, Fraction)
    assert result.certified


def test_identical_measures_cost_zero(unit_interval):
    mu = interval_measure(unit_interval, ((Fraction(1, 3), Fraction(1, 2)), (Fraction(2, 3), Fraction(1, 2))))
    result = solve_wasserstein(mu, mu, p=1)
    assert result.powered_cost == 0
    assert result.certified


def test_dual_potentials_are_feasible_and_anchored(unit_interval):
    rng = make_rng(3)
    mu = random_measure(rng, unit_interval, 6, exact=True)
    nu = random_measure(rng, unit_interval, 5, exact=True)
    result = solve_wasserstein(mu, nu, p=1)
    u, v = result.dual_potentials
    assert u[0] == 0
    rows = result.coupling.row_points
    cols = result.coupling.col_points
    total = 0
    for j, rp in enumerate(rows):
        for k, cp in enumerate(cols):
            cost = powered_distance(unit_interval, rp, cp, 1)
            assert u[j] + v[k] <= cost
    for j, m in enumerate(mu.masses):
        total += u[j] * m
    for k, m in enumerate(nu.masses):
        total += v[k] * m
    assert total == result.powered_cost


def test_exact_solves_match_exhaustive_oracle(small_tree):
    rng = make_rng(17)
    for _ in range(25):
        mu = random_measure(rng, small_tree, int(rng.integers(1, 5)), exact=True, mass_denominator=8)
        nu = random_measure(rng, small_tree, int(rng.integers(1, 5)), exact=True, mass_denominator=8)
        result = solve_wasserstein(mu, nu, p=1)
        denom = 8
        supply = tuple(int(m * denom) for m in mu.masses)
        demand = tuple(int(m * denom) for m in nu.masses)
        costs = [
            [small_tree.distance(a, b) for b in nu.support] for a in mu.support
        ]
        expected = Fraction(exhaustive_min_cost(supply, demand, costs), denom)
        assert result.powered_cost == expected
        assert result.certified


def test_float_solves_match_reference_lp(snowflake_plane):
    rng = make_rng(29)
    for _ in range(20):
        mu = random_measure(rng, snowflake_plane, int(rng.integers(2, 7)))
        nu = random_measure(rng, snowflake_plane, int(rng.integers(2, 7)))
        result = solve_wasserstein(mu, nu, p=2)
        costs = [
            [powered_distance(snowflake_plane, a, b, 2) for b in nu.support]
            for a in mu.support
        ]
        ref = linprog_transport_cost(mu.masses, nu.masses, costs)
        assert float(result.powered_cost) == pytest.approx(ref, abs=1e-8)


def test_powered_cost_compares_powers_not_roots():
    space = Product(Fraction(1, 2), 2, Euclidean(1))
    a = ProductPoint(Fraction(0), EuclideanPoint((Fraction(0),)))
    b = ProductPoint(Fraction(1, 2), EuclideanPoint((Fraction(2),)))
    mu = DiscreteMeasure(space, ((a, 1),))
    nu = DiscreteMeasure(space, ((b, 1),))
    result = solve_wasserstein(mu, nu, p=2)
    assert result.powered_cost == Fraction(1, 2) + 4
    assert isinstance(result.powered_cost, Fraction)
    assert isinstance(result.cost, float)


def test_kr_dual_routes_agree(snowflake_plane):
    rng = make_rng(41)
    for _ in range(10):
        mu = random_measure(rng, snowflake_plane, int(rng.integers(1, 6)))
        nu = random_measure(rng, snowflake_plane, int(rng.integers(1, 6)))
        primal = solve_wasserstein(mu, nu, p=1)
        reused = kr_dual(mu, nu)
        fresh = kr_dual(mu, nu, independent=True)
        assert reused.method != fresh.method
        assert float(reused.value) == pytest.approx(float(primal.powered_cost), abs=1e-9)
        assert float(fresh.value) == pytest.approx(float(primal.powered_cost), abs=1e-8)


def test_validate_coupling_rejects_wrong_marginals(unit_interval):
    mu = interval_measure(unit_interval, ((Fraction(0), Fraction(1, 2)), (Fraction(1), Fraction(1, 2))))
    nu = interval_measure(unit_interval, ((Fraction(1, 2), Fraction(1),),))
    plan = Coupling(
        unit_interval,
        tuple(mu.support),
        tuple(nu.support),
        ((Fraction(1, 4),), (Fraction(3, 4),)),
    )
    with pytest.raises(CouplingError):
        validate_coupling(plan, mu, nu)


def test_random_coupling_is_feasible(snowflake_plane):
    rng = make_rng(53)
    for _ in range(20):
        mu = random_measure(rng, snowflake_plane, int(rng.integers(1, 8)))
        nu = random_measure(rng, snowflake_plane, int(rng.integers(1, 8)))
        pi = random_coupling(rng, mu, nu)
        validate_coupling(pi, mu, nu)


def test_cyclical_monotonicity_flags_a_swapped_plan():
    line = Finite(((0, 1, 10, 11), (1, 0, 9, 10), (10, 9, 0, 1), (11, 10, 1, 0)))
    mu = DiscreteMeasure(line, ((FinitePoint(0), Fraction(1, 2)), (FinitePoint(2), Fraction(1, 2))))
    nu = DiscreteMeasure(line, ((FinitePoint(1), Fraction(1, 2)), (FinitePoint(3), Fraction(1, 2))))
    good = solve_wasserstein(mu, nu, p=1).coupling
    assert check_cyclical_monotonicity(good, p=1).ok
    crossed = Coupling(
        line,
        good.row_points,
        good.col_points,
        ((0, Fraction(1, 2)), (Fraction(1, 2), 0)),
    )
    report = check_cyclical_monotonicity(crossed, p=1)
    assert not report.ok


def test_pivot_budget_trips_stall_error():
    # identity pairing from the northwest corner is far from optimal here
    line = Finite(((0, 10, 11, 1), (10, 0, 1, 9), (11, 1, 0, 10), (1, 9, 10, 0)))
    mu = DiscreteMeasure(line, ((FinitePoint(0), Fraction(1, 2)), (FinitePoint(1), Fraction(1, 2))))
    nu = DiscreteMeasure(line, ((FinitePoint(2), Fraction(1, 2)), (FinitePoint(3), Fraction(1, 2))))
    full = solve_wasserstein(mu, nu, p=1)
    assert full.powered_cost == 1
    with pytest.raises(SolverStallError):
        solve_wasserstein(mu, nu, p=1, pivot_budget=0)


def test_coupling_cost_exponent(unit_interval):
    mu = interval_measure(unit_interval, ((Fraction(0), 1),))
    nu = interval_measure(unit_interval, ((Fraction(1, 2), 1),))
    pi = Coupling(unit_interval, tuple(mu.support), tuple(nu.support), ((Fraction(1),),))
    assert coupling_cost(pi, 1) == Fraction(1, 2)
    assert coupling_cost(pi, 2) == Fraction(1, 4)


def test_result_record_round_trips_through_json(unit_interval):
    import json

    from otlab.solver import result_to_json

    mu = interval_measure(unit_interval, ((Fraction(0), Fraction(1, 2)), (Fraction(1), Fraction(1, 2))))
    nu = interval_measure(unit_interval, ((Fraction(1, 2), 1),))
    result = solve_wasserstein(mu, nu, p=1)
    record = json.loads(result_to_json(result))
    assert record["certified"] is True
    assert record["cost"] == "1/2"
    assert record["p"] == "1"
    assert record["row_support"] == ["0", "1"]
    assert record["col_support"] == ["1/2"]
    # triplets are (row index, col index, mass)
    assert record["coupling"] == [[0, 0, "1/2"], [1, 0, "1/2"]]
    assert len(record["dual_u"]) == 2 and len(record["dual_v"]) == 1
