"""Seeded random generators for points, measures, and couplings.

Everything here is deterministic given the seed: the verification campaigns
derive one child seed per trial so runs are reproducible and individual
trials can be replayed in isolation. Exact mode draws masses and
coordinates as Fractions with bounded denominators so downstream solves
stay in rational arithmetic end to end.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import DomainError
from .measure import DiscreteMeasure
from .metric import (
    Euclidean,
    EuclideanPoint,
    Finite,
    FinitePoint,
    Interval,
    IntervalPoint,
    Product,
    ProductPoint,
)
from .solver import Coupling, _northwest_corner

__all__ = [
    "DEFAULT_WINDOW",
    "make_rng",
    "random_masses",
    "random_point",
    "random_measure",
    "random_coupling",
    "random_finite_space",
]

DEFAULT_WINDOW = 10.0


def make_rng(seed):
    """numpy Generator from an int seed or a tuple of ints."""
    return np.random.default_rng(seed)


def random_masses(rng, count, exact=False, denominator=64):
    """``count`` positive masses summing to one.

    Exact mode returns Fractions with the given common denominator (a random
    composition, so every part is at least 1/denominator). Float mode
    normalizes uniforms drawn away from zero.
    """
    if count < 1:
        raise DomainError("need at least one mass")
    if exact:
        if denominator < count:
            raise DomainError(f"denominator {denominator} too small for {count} parts")
        cuts = sorted(int(c) for c in rng.choice(denominator - 1, size=count - 1, replace=False))
        bounds = [0] + [c + 1 for c in cuts] + [denominator]
        return [Fraction(b - a, denominator) for a, b in zip(bounds, bounds[1:])]
    raw = rng.uniform(0.1, 1.0, count)
    return [float(w) for w in raw / raw.sum()]


def _random_fraction(rng, lo, hi, denominator):
    return Fraction(int(rng.integers(lo * denominator, hi * denominator + 1)), denominator)


def _window_bounds(window):
    """A scalar w means [-w, w]; a pair is an explicit [lo, hi]."""
    if isinstance(window, tuple):
        lo, hi = window
    else:
        lo, hi = -window, window
    if not lo < hi:
        raise DomainError(f"empty sampling window [{lo!r}, {hi!r}]")
    return lo, hi


def random_point(rng, space, exact=False, window=DEFAULT_WINDOW, denominator=32):
    """One random point of ``space``; exact mode uses bounded-denominator rationals."""
    if isinstance(space, Interval):
        if exact:
            return IntervalPoint(_random_fraction(rng, 0, 1, denominator))
        return IntervalPoint(float(rng.uniform(0, 1)))
    if isinstance(space, Euclidean):
        lo, hi = _window_bounds(window)
        if exact:
            coords = tuple(
                _random_fraction(rng, int(lo), int(hi), denominator) for _ in range(space.dim)
            )
        else:
            coords = tuple(float(c) for c in rng.uniform(lo, hi, space.dim))
        return EuclideanPoint(coords)
    if isinstance(space, Finite):
        return FinitePoint(int(rng.integers(0, space.size)))
    if isinstance(space, Product):
        t = random_point(rng, Interval(1), exact=exact, denominator=denominator).t
        x = random_point(rng, space.base, exact=exact, window=window, denominator=denominator)
        return ProductPoint(t, x)
    raise DomainError(f"unsupported space {space!r}")


def random_measure(
    rng,
    space,
    n_atoms,
    exact=False,
    window=DEFAULT_WINDOW,
    denominator=32,
    mass_denominator=64,
    distinct_fibers=False,
):
    """Random measure with ``n_atoms`` distinct support points.

    ``distinct_fibers`` additionally forces pairwise-distinct base points on
    a product space (no two atoms in the same fiber), which the fiberwise
    transforms and the coupling lift require.
    """
    if n_atoms < 1:
        raise DomainError("need at least one atom")
    if distinct_fibers and not isinstance(space, Product):
        raise DomainError("distinct fibers only make sense on a product space")
    points = []
    seen = set()
    fibers = set()
    attempts = 0
    while len(points) < n_atoms:
        attempts += 1
        if attempts > 200 * n_atoms:
            raise DomainError("could not sample enough distinct points")
        p = random_point(rng, space, exact=exact, window=window, denominator=denominator)
        if p in seen:
            continue
        if distinct_fibers and p.x in fibers:
            continue
        seen.add(p)
        if distinct_fibers:
            fibers.add(p.x)
        points.append(p)
    masses = random_masses(rng, n_atoms, exact=exact, denominator=mass_denominator)
    return DiscreteMeasure(space, tuple(zip(points, masses)))


def random_coupling(rng, mu, nu):
    """A random vertex of the coupling polytope between mu and nu.

    Runs the northwest-corner rule on shuffled row and column orders and
    maps the flows back to canonical support order, so the marginals match
    exactly while the sparsity pattern varies with the seed.
    """
    m = len(mu.atoms)
    n = len(nu.atoms)
    row_order = [int(i) for i in rng.permutation(m)]
    col_order = [int(k) for k in rng.permutation(n)]
    a = [mu.masses[i] for i in row_order]
    b = [nu.masses[k] for k in col_order]
    flows, _basis = _northwest_corner(a, b, m, n)
    zero = 0 * (mu.masses[0] + nu.masses[0])
    weights = [[zero] * n for _ in range(m)]
    for (i, k), f in flows.items():
        weights[row_order[i]][col_order[k]] = f
    return Coupling(mu.space, mu.support, nu.support, tuple(tuple(r) for r in weights))


def random_finite_space(rng, size, exact=False, span=6):
    """Random finite metric space from city-block distances on a grid.

    Distinct integer grid points guarantee symmetry, positivity, and the
    triangle inequality with no tolerance games; float mode just casts the
    same integers.
    """
    if size < 1:
        raise DomainError("need at least one point")
    if size > (span + 1) ** 2:
        raise DomainError(f"grid of span {span} cannot hold {size} distinct points")
    cells = rng.choice((span + 1) ** 2, size=size, replace=False)
    pts = [(int(c) // (span + 1), int(c) % (span + 1)) for c in cells]
    rows = []
    for x1, y1 in pts:
        row = [abs(x1 - x2) + abs(y1 - y2) for x2, y2 in pts]
        rows.append(tuple(row if exact else [float(v) for v in row]))
    return Finite(tuple(rows))
