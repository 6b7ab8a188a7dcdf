"""Probes that separate rigid spaces from flexible ones.

A measure xi sits at ratio lambda between mu and nu when it splits the
distance exactly: d(mu, xi) = lambda d(mu, nu) and d(xi, nu) makes up the
rest. On a snowflaked product that set collapses to the convex
combination alone; on the plain interval it does not. The geodesic
section extends a constant-speed curve past its endpoint and verifies
the speed with fresh solves.
"""

from fractions import Fraction

from otlab import (
    DiscreteMeasure,
    Interval,
    IntervalPoint,
    build_geodesic_extension,
    detect_dirac_pair_form,
    dirac_pair_mixture_candidates,
    extend_geodesic,
    geodesic_speed_check,
    ratio_set_scan,
    triangle_defect,
)
from otlab.campaign import alpha_form_pair
from otlab.sampling import make_rng, random_point
from otlab import Euclidean, Product, ProductPoint


def main():
    rng = make_rng(2024)

    print("ratio-set scan on a snowflaked product (exponent 1/2)")
    mu, nu, eta, y, y_prime, c = alpha_form_pair(rng, alpha=0.5, q=2)
    form = detect_dirac_pair_form(mu, nu)
    candidates = dirac_pair_mixture_candidates(form, mu.space, step=0.25)
    report = ratio_set_scan(mu, nu, 0.5, candidates, tol=1e-8)
    print(f"  shared remainder atoms: {len(eta.atoms)}, swap weight c = {c:.3f}")
    print(f"  candidates checked: {report.candidates_checked}")
    print(f"  members found: {len(report.members)} (singleton: {report.is_singleton})")

    print("\nthe same scan on the unit interval finds extra members")
    line = Interval(1)
    left = DiscreteMeasure(line, ((IntervalPoint(Fraction(0)), Fraction(1)),))
    right = DiscreteMeasure(line, ((IntervalPoint(Fraction(1)), Fraction(1)),))
    midpoint = DiscreteMeasure(line, ((IntervalPoint(Fraction(1, 2)), Fraction(1)),))
    flat = ratio_set_scan(left, right, Fraction(1, 2), [midpoint])
    print(f"  members found: {len(flat.members)} (singleton: {flat.is_singleton})")
    print("  the interior point mass splits the distance without being a mixture")

    print("\nwhy the collapse happens: distinct first coordinates force strict triangles")
    space = Product(0.5, 2, Euclidean(2))
    worst = None
    for i in range(200):
        r = make_rng((2024, i))
        ts = sorted(float(v) for v in r.uniform(0, 1, 3))
        if ts[1] - ts[0] < 0.01 or ts[2] - ts[1] < 0.01:
            continue
        a, b, c3 = (ProductPoint(t, random_point(r, Euclidean(2))) for t in ts)
        defect = triangle_defect(space, a, b, c3)
        if worst is None or defect < worst:
            worst = defect
    print(f"  smallest detour penalty over 200 sampled triples: {worst:.4f}")

    print("\nextending a geodesic past its endpoint, all rational")
    sq = Product(1, 1, Interval(1))
    anchor = ProductPoint(Fraction(0), IntervalPoint(Fraction(0)))
    target = ProductPoint(Fraction(1), IntervalPoint(Fraction(1)))
    remainder = DiscreteMeasure(
        sq, ((ProductPoint(Fraction(1, 2), IntervalPoint(Fraction(1, 2))), 1),)
    )
    ext = build_geodesic_extension(sq, remainder, anchor, target, Fraction(1, 2))
    lo, hi = ext.domain()
    print(f"  domain [{lo}, {hi}], speed {ext.v}")
    for s in (lo, Fraction(-1, 4), Fraction(0), Fraction(1, 2), Fraction(1)):
        atoms = ", ".join(f"{m} at ({p.t}, {p.x.t})" for p, m in extend_geodesic(ext, s).atoms)
        print(f"  s = {str(s):>4}: {atoms}")
    pairs = [(lo, Fraction(-1, 4)), (Fraction(-1, 4), Fraction(1, 2)), (lo, Fraction(1))]
    check = geodesic_speed_check(ext, pairs)
    print(f"  speed check ok: {check.ok}, worst residual {check.worst_residual}")


if __name__ == "__main__":
    main()
