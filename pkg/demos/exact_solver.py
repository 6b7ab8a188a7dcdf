"""Exact rational transport on the city-block square.

Fraction inputs flow through the transportation simplex unchanged: the
optimal cost, the plan, and the optimality certificate all come back as
exact rationals. The last section shows what the pivot budget does.
"""

from fractions import Fraction

from otlab import (
    DiscreteMeasure,
    Finite,
    FinitePoint,
    Interval,
    IntervalPoint,
    Product,
    ProductPoint,
    SolverStallError,
    solve_wasserstein,
)
from otlab.solver import kr_dual


def pt(t, x):
    return ProductPoint(Fraction(t), IntervalPoint(Fraction(x)))


def main():
    space = Product(1, 1, Interval(1))
    mu = DiscreteMeasure(
        space,
        (
            (pt("0", "0"), Fraction(1, 2)),
            (pt("1/2", "1/4"), Fraction(1, 4)),
            (pt("1", "1"), Fraction(1, 4)),
        ),
    )
    nu = DiscreteMeasure(
        space,
        (
            (pt("1/4", "1/2"), Fraction(2, 3)),
            (pt("3/4", "3/4"), Fraction(1, 3)),
        ),
    )

    result = solve_wasserstein(mu, nu, p=1)
    print("combined distance |dt| + |dx|, all arithmetic in Fractions")
    print(f"  distance       = {result.cost}")
    print(f"  certified      = {result.certified}")
    print(f"  simplex pivots = {result.pivots}")
    print("  plan:")
    plan = result.coupling
    for j, row in enumerate(plan.weights):
        for k, w in enumerate(row):
            if w != 0:
                src, dst = plan.row_points[j], plan.col_points[k]
                print(f"    {w} : ({src.t}, {src.x.t}) -> ({dst.t}, {dst.x.t})")

    witness = kr_dual(mu, nu)
    print(f"  dual value     = {witness.value} (route: {witness.method})")
    assert witness.value == result.cost

    print("\na pivot budget of zero keeps the starting plan and reports the stall")
    crossing = Finite(((0, 10, 11, 1), (10, 0, 1, 9), (11, 1, 0, 10), (1, 9, 10, 0)))
    left = DiscreteMeasure(
        crossing, ((FinitePoint(0), Fraction(1, 2)), (FinitePoint(1), Fraction(1, 2)))
    )
    right = DiscreteMeasure(
        crossing, ((FinitePoint(2), Fraction(1, 2)), (FinitePoint(3), Fraction(1, 2)))
    )
    try:
        solve_wasserstein(left, right, p=1, pivot_budget=0)
    except SolverStallError as exc:
        print(f"  SolverStallError: {exc}")
    full = solve_wasserstein(left, right, p=1)
    print(f"  with the default budget the distance is {full.cost} "
          f"after {full.pivots} pivots")


if __name__ == "__main__":
    main()
