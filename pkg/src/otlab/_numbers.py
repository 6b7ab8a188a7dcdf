"""Number handling shared by the float and exact-rational code paths.

Scalars flow through the library as plain Python numbers: ``float`` in float
mode, ``int``/``Fraction`` in exact mode. Exactness is a property of the
inputs, not a global switch; these helpers keep parsing, formatting, and
exponentiation consistent between the two modes.
"""

from __future__ import annotations

import math
from fractions import Fraction

__all__ = [
    "DEFAULT_TOL",
    "is_exact",
    "all_exact",
    "parse_number",
    "format_number",
    "powered_abs",
    "root",
    "mass_denominator_lcm",
]

DEFAULT_TOL = 1e-9

_EXACT_TYPES = (int, Fraction)


def is_exact(x) -> bool:
    return isinstance(x, _EXACT_TYPES)


def all_exact(values) -> bool:
    return all(isinstance(v, _EXACT_TYPES) for v in values)


def parse_number(token: str, exact: bool = False):
    """Parse ``token`` as a number.

    Accepts plain decimals (``0.25``, ``1e-3``) and rationals (``3/10``).
    With ``exact=True`` the result is an ``int`` or ``Fraction`` (decimals are
    read exactly, so ``0.3`` becomes 3/10, not the nearest binary float);
    otherwise a ``float``.
    """
    token = token.strip()
    if not token:
        raise ValueError("empty number token")
    try:
        value = Fraction(token)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"invalid number {token!r}") from exc
    if exact:
        return int(value) if value.denominator == 1 else value
    return float(value)


def format_number(x) -> str:
    """Format a number for text records.

    Integral values print bare (``0``, ``1``), Fractions as ``p/q``, floats
    via ``repr`` (shortest round-trip form).
    """
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar value here")
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"
    xf = float(x)
    if xf == int(xf) and abs(xf) < 1e16:
        return str(int(xf))
    return repr(xf)


def powered_abs(delta, exponent):
    """Compute ``|delta| ** exponent`` staying exact when possible.

    Exact inputs stay exact when the exponent is a nonnegative integer
    (including Fractions with denominator 1); any other combination falls
    back to floats.
    """
    mag = abs(delta)
    if isinstance(exponent, Fraction) and exponent.denominator == 1:
        exponent = int(exponent)
    if isinstance(exponent, int):
        if exponent == 1:
            return mag
        if is_exact(mag):
            return mag**exponent
        return float(mag) ** exponent
    if isinstance(exponent, float) and exponent == int(exponent):
        return powered_abs(mag, int(exponent))
    return float(mag) ** float(exponent)


def root(value, q):
    """q-th root for reporting boundaries.

    Exact values survive only the trivial ``q == 1`` case; everything else
    is a float. Tiny negative float dust is clamped to zero.
    """
    if isinstance(q, Fraction) and q.denominator == 1:
        q = int(q)
    if q == 1:
        return value
    v = float(value)
    if v < 0.0:
        v = 0.0
    if q == 2:
        return math.sqrt(v)
    return v ** (1.0 / float(q))


def mass_denominator_lcm(values) -> int:
    """lcm of the denominators of exact values (1 if the list is empty)."""
    L = 1
    for v in values:
        d = v.denominator if isinstance(v, Fraction) else 1
        L = L * d // math.gcd(L, d)
    return L
