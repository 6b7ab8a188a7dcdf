"""Metric spaces and points.

Four space kinds, all immutable:

* ``Interval(alpha)``: [0, 1] under the snowflaked metric |t - t'|^alpha.
* ``Euclidean(dim)``: R^dim with the Euclidean metric.
* ``Finite(matrix)``: an explicit finite metric, fully validated.
* ``Product(alpha, q, base)``: [0, 1] x X under
  ``(|t - t'|^(alpha*q) + d_X(x, x')^q) ** (1/q)``,
  the snowflake-interval product over a base space X.

Distances stay exact (int/Fraction in, Fraction out) whenever the exponent
arithmetic allows; q-th roots are deferred to ``distance`` so powered values
can be compared without ever taking roots in exact mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .errors import DomainError, InvalidSpaceError, ParseError, SpaceMismatchError
from ._numbers import DEFAULT_TOL, format_number, is_exact, parse_number, powered_abs, root

__all__ = [
    "IntervalPoint",
    "EuclideanPoint",
    "FinitePoint",
    "ProductPoint",
    "Point",
    "Interval",
    "Euclidean",
    "Finite",
    "Product",
    "MetricSpace",
    "point_sort_key",
    "distance",
    "powered_distance",
    "triangle_defect",
    "metric_segment",
    "segment_is_trivial",
    "load_finite_space",
]

_MAX_FINITE_POINTS = 256


# ---------------------------------------------------------------------------
# points


@dataclass(frozen=True)
class IntervalPoint:
    t: Union[int, float, Fraction]

    def sort_key(self):
        return (self.t,)


@dataclass(frozen=True)
class EuclideanPoint:
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))

    def sort_key(self):
        return self.coords


@dataclass(frozen=True)
class FinitePoint:
    index: int

    def sort_key(self):
        return (self.index,)


@dataclass(frozen=True)
class ProductPoint:
    t: Union[int, float, Fraction]
    x: Union[IntervalPoint, EuclideanPoint, FinitePoint]

    def sort_key(self):
        return (self.t,) + self.x.sort_key()


Point = Union[IntervalPoint, EuclideanPoint, FinitePoint, ProductPoint]


def point_sort_key(point):
    """Canonical lexicographic key used to order measure atoms."""
    return point.sort_key()


# ---------------------------------------------------------------------------
# spaces


def _check_unit_range(t, what):
    if not (0 <= t <= 1):
        raise SpaceMismatchError(f"{what} coordinate {t!r} outside [0, 1]")


def _check_alpha(alpha):
    if not (0 < alpha <= 1):
        raise InvalidSpaceError(f"snowflake exponent alpha={alpha!r} outside (0, 1]")


@dataclass(frozen=True)
class Interval:
    """[0, 1] with d(t, t') = |t - t'| ** alpha."""

    alpha: Union[int, float, Fraction] = 1

    def __post_init__(self):
        _check_alpha(self.alpha)

    def validate_point(self, p):
        if not isinstance(p, IntervalPoint):
            raise SpaceMismatchError(f"expected IntervalPoint, got {type(p).__name__}")
        _check_unit_range(p.t, "interval")

    def distance(self, a, b):
        return powered_abs(a.t - b.t, self.alpha)

    def powered_distance(self, a, b, p):
        return powered_abs(a.t - b.t, _mul_exponents(self.alpha, p))

    def describe(self):
        return f"interval:alpha={format_number(self.alpha)}"


@dataclass(frozen=True)
class Euclidean:
    """R^dim with the Euclidean metric. dim == 1 stays exact for exact inputs."""

    dim: int = 1

    def __post_init__(self):
        if not (isinstance(self.dim, int) and self.dim >= 1):
            raise InvalidSpaceError(f"dimension must be a positive integer, got {self.dim!r}")

    def validate_point(self, p):
        if not isinstance(p, EuclideanPoint):
            raise SpaceMismatchError(f"expected EuclideanPoint, got {type(p).__name__}")
        if len(p.coords) != self.dim:
            raise SpaceMismatchError(
                f"point has {len(p.coords)} coordinates, space has dimension {self.dim}"
            )

    def _sq(self, a, b):
        return sum((u - v) * (u - v) for u, v in zip(a.coords, b.coords))

    def distance(self, a, b):
        if self.dim == 1:
            return abs(a.coords[0] - b.coords[0])
        return math.sqrt(float(self._sq(a, b)))

    def powered_distance(self, a, b, p):
        if self.dim == 1:
            return powered_abs(a.coords[0] - b.coords[0], p)
        sq = self._sq(a, b)
        if isinstance(p, Fraction) and p.denominator == 1:
            p = int(p)
        if isinstance(p, int) and p % 2 == 0:
            return sq ** (p // 2)
        if isinstance(p, float) and p == int(p) and int(p) % 2 == 0:
            return sq ** (int(p) // 2)
        return float(sq) ** (float(p) / 2.0)

    def describe(self):
        return f"euclidean:dim={self.dim}"


def _validate_finite_matrix(matrix):
    n = len(matrix)
    if n == 0:
        raise InvalidSpaceError("finite space needs at least one point")
    if n > _MAX_FINITE_POINTS:
        raise InvalidSpaceError(f"finite space capped at {_MAX_FINITE_POINTS} points, got {n}")
    for i, row in enumerate(matrix):
        if len(row) != n:
            raise InvalidSpaceError(f"row {i} has length {len(row)}, expected {n}")
    for i in range(n):
        if matrix[i][i] != 0:
            raise InvalidSpaceError(f"nonzero diagonal entry at ({i}, {i})")
        for j in range(i + 1, n):
            if matrix[i][j] != matrix[j][i]:
                raise InvalidSpaceError(f"asymmetric entries at ({i}, {j})")
            if not matrix[i][j] > 0:
                raise InvalidSpaceError(f"off-diagonal entry at ({i}, {j}) must be positive")
    exact = all(is_exact(v) for row in matrix for v in row)
    if exact:
        for k in range(n):
            for i in range(n):
                dik = matrix[i][k]
                row_k = matrix[k]
                row_i = matrix[i]
                for j in range(n):
                    if row_i[j] > dik + row_k[j]:
                        raise InvalidSpaceError(
                            f"triangle inequality fails: d({i},{j}) > d({i},{k}) + d({k},{j})"
                        )
    else:
        import numpy as np

        D = np.asarray([[float(v) for v in row] for row in matrix])
        # slack absorbs decimal-to-binary round-off from file input
        slack = 1e-12
        for k in range(n):
            if (D > D[:, k][:, None] + D[k, :][None, :] + slack).any():
                bad = np.argwhere(D > D[:, k][:, None] + D[k, :][None, :] + slack)[0]
                i, j = int(bad[0]), int(bad[1])
                raise InvalidSpaceError(
                    f"triangle inequality fails: d({i},{j}) > d({i},{k}) + d({k},{j})"
                )


@dataclass(frozen=True)
class Finite:
    """Finite metric space given by its full distance matrix (indices 0..n-1)."""

    matrix: tuple = field()

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.matrix)
        object.__setattr__(self, "matrix", rows)
        _validate_finite_matrix(rows)

    @property
    def size(self):
        return len(self.matrix)

    def validate_point(self, p):
        if not isinstance(p, FinitePoint):
            raise SpaceMismatchError(f"expected FinitePoint, got {type(p).__name__}")
        if not (isinstance(p.index, int) and 0 <= p.index < self.size):
            raise SpaceMismatchError(f"index {p.index!r} outside 0..{self.size - 1}")

    def distance(self, a, b):
        return self.matrix[a.index][b.index]

    def powered_distance(self, a, b, p):
        return powered_abs(self.matrix[a.index][b.index], p)

    def describe(self):
        return f"finite:n={self.size}"


@dataclass(frozen=True)
class Product:
    """[0, 1] x base under the snowflake product metric.

    d((t, x), (t', x')) = (|t - t'| ** (alpha * q) + d_X(x, x') ** q) ** (1/q)
    """

    alpha: Union[int, float, Fraction]
    q: Union[int, float, Fraction]
    base: Union[Interval, Euclidean, Finite]

    def __post_init__(self):
        _check_alpha(self.alpha)
        if not self.q >= 1:
            raise InvalidSpaceError(f"exponent q={self.q!r} must be >= 1")
        if isinstance(self.base, Product):
            raise InvalidSpaceError("nested product spaces are not supported")

    def validate_point(self, p):
        if not isinstance(p, ProductPoint):
            raise SpaceMismatchError(f"expected ProductPoint, got {type(p).__name__}")
        _check_unit_range(p.t, "product")
        self.base.validate_point(p.x)

    def powered_distance(self, a, b, p):
        if p == self.q:
            fiber = powered_abs(a.t - b.t, _mul_exponents(self.alpha, self.q))
            return fiber + self.base.powered_distance(a.x, b.x, self.q)
        d = self.distance(a, b)
        return powered_abs(d, p)

    def distance(self, a, b):
        return root(self.powered_distance(a, b, self.q), self.q)

    def describe(self):
        return (
            f"product:alpha={format_number(self.alpha)}"
            f":q={format_number(self.q)}:{self.base.describe()}"
        )


MetricSpace = Union[Interval, Euclidean, Finite, Product]


def _mul_exponents(a, b):
    """Multiply two exponents, collapsing exact products to int when integral."""
    prod = a * b
    if isinstance(prod, Fraction) and prod.denominator == 1:
        return int(prod)
    if isinstance(prod, float) and prod == int(prod):
        return int(prod)
    return prod


# ---------------------------------------------------------------------------
# operations


def distance(space, a, b):
    """Metric distance between two validated points of ``space``."""
    space.validate_point(a)
    space.validate_point(b)
    return space.distance(a, b)


def powered_distance(space, a, b, p):
    """d(a, b) ** p, computed without roots whenever the exponents allow."""
    if not p >= 1:
        raise DomainError(f"cost exponent p={p!r} must be >= 1")
    space.validate_point(a)
    space.validate_point(b)
    return space.powered_distance(a, b, p)


def triangle_defect(space, a, b, c):
    """d(a,b) + d(b,c) - d(a,c), clamped at zero.

    The clamp only absorbs rounding dust; a valid metric never produces a
    genuinely negative defect.
    """
    space.validate_point(a)
    space.validate_point(b)
    space.validate_point(c)
    defect = space.distance(a, b) + space.distance(b, c) - space.distance(a, c)
    zero = defect - defect
    return defect if defect > zero else zero


def metric_segment(space, a, b, candidates, tol=DEFAULT_TOL):
    """Points among ``candidates`` lying on the metric segment [a, b].

    A candidate w qualifies when |d(a,w) + d(w,b) - d(a,b)| <= tol. The
    candidate list must be nonempty and contain both endpoints; the result
    therefore always contains a and b. Exact duplicates are returned once,
    in first-seen order.
    """
    candidates = list(candidates)
    if not candidates:
        raise DomainError("metric_segment needs a nonempty candidate list")
    if a not in candidates or b not in candidates:
        raise DomainError("candidate list must contain both endpoints")
    space.validate_point(a)
    space.validate_point(b)
    d_ab = space.distance(a, b)
    seen = []
    for w in candidates:
        if w in seen:
            continue
        space.validate_point(w)
        gap = space.distance(a, w) + space.distance(w, b) - d_ab
        if abs(gap) <= tol:
            seen.append(w)
    return seen


def segment_is_trivial(space, a, b):
    """Analytic certificate that the metric segment [a, b] is just {a, b}.

    For a product space with alpha < 1 and q > 1 and distinct fiber
    coordinates t, strict concavity of s^alpha plus strict Minkowski
    inequality rule out intermediate points, so the answer is a certified
    True. Every other configuration returns False, meaning "not certified"
    (q == 1 genuinely admits intermediate points when the base has them,
    since the metric is then additively separable).
    """
    if not isinstance(space, Product):
        return False
    space.validate_point(a)
    space.validate_point(b)
    if a == b:
        return False
    return space.alpha < 1 and space.q > 1 and a.t != b.t


# ---------------------------------------------------------------------------
# file format: first line n, then n lines of n space-separated entries


def load_finite_space(path, exact=False):
    """Read a finite metric space from a text file.

    Format: first line holds n, then n lines of n space-separated distances.
    Numbers may be decimals or rationals ``p/q``; ``exact=True`` parses them
    as Fractions.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    rows = []
    n = None
    lineno = 0
    for raw in lines:
        lineno += 1
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        if n is None:
            try:
                n = int(text)
            except ValueError:
                raise ParseError("expected point count", path=path, line=lineno) from None
            if n <= 0:
                raise ParseError("point count must be positive", path=path, line=lineno)
            continue
        tokens = text.split()
        if len(tokens) != n:
            raise ParseError(
                f"expected {n} entries, got {len(tokens)}", path=path, line=lineno
            )
        row = []
        for col, tok in enumerate(tokens, start=1):
            try:
                row.append(parse_number(tok, exact=exact))
            except ValueError:
                raise ParseError(
                    f"invalid number {tok!r}", path=path, line=lineno, column=col
                ) from None
        rows.append(row)
        if len(rows) == n:
            break
    if n is None:
        raise ParseError("empty finite-space file", path=path, line=lineno or 1)
    if len(rows) != n:
        raise ParseError(f"expected {n} rows, got {len(rows)}", path=path, line=lineno)
    try:
        return Finite(tuple(tuple(r) for r in rows))
    except InvalidSpaceError as exc:
        raise ParseError(str(exc), path=path) from exc
