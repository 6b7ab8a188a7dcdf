"""Walk through the CDF/quantile exchange on the unit interval.

Builds a small measure, flips it by the closed form and by the explicit
CDF route, checks the involution, and shows the four-element transform
group acting on one example.
"""

from fractions import Fraction

from otlab import (
    DiscreteMeasure,
    Interval,
    IntervalPoint,
    apply_interval_isometry,
    cdf,
    flip,
    flip_via_cdf,
    reflect,
    solve_wasserstein,
)
from otlab.isometry import IntervalIsometry


def show(label, mu):
    atoms = ", ".join(f"{m} at {p.t}" for p, m in mu.atoms)
    print(f"  {label}: {atoms}")


def main():
    space = Interval(1)
    mu = DiscreteMeasure(
        space,
        (
            (IntervalPoint(Fraction(1, 5)), Fraction(1, 2)),
            (IntervalPoint(Fraction(3, 5)), Fraction(1, 4)),
            (IntervalPoint(Fraction(9, 10)), Fraction(1, 4)),
        ),
    )

    print("flip exchanges positions and cumulative masses")
    show("input", mu)
    steps = cdf(mu)
    print(f"  cdf steps: {[(b, v) for b, v in zip(steps.breakpoints, steps.values)]}")
    image = flip(mu)
    show("closed form", image)
    show("cdf route", flip_via_cdf(mu))
    assert image.atoms == flip_via_cdf(mu).atoms

    print("\napplying flip twice returns the input exactly")
    show("flip(flip(input))", flip(image))
    assert flip(image).atoms == mu.atoms

    print("\nthe transform group on one point mass at 3/10")
    delta = DiscreteMeasure(space, ((IntervalPoint(Fraction(3, 10)), Fraction(1)),))
    for iso in IntervalIsometry:
        show(iso.name.lower().replace("_", "-"), apply_interval_isometry(iso, delta))

    print("\nflip preserves transport distances")
    nu = DiscreteMeasure(
        space,
        (
            (IntervalPoint(Fraction(0)), Fraction(1, 3)),
            (IntervalPoint(Fraction(1, 2)), Fraction(2, 3)),
        ),
    )
    before = solve_wasserstein(mu, nu, p=1).cost
    after = solve_wasserstein(flip(mu), flip(nu), p=1).cost
    print(f"  d(mu, nu) = {before}, d(flip mu, flip nu) = {after}")
    assert before == after

    print("\nflip and reflect commute, so the group has just four elements")
    left = reflect(flip(mu))
    right = flip(reflect(mu))
    show("reflect(flip(mu))", left)
    show("flip(reflect(mu))", right)
    assert left.atoms == right.atoms


if __name__ == "__main__":
    main()
