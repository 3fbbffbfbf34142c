"""Exact scalar helpers built on :class:`fractions.Fraction`.

Every quantity in the package (probabilities, prices, coordinates) is a
``Fraction``.  Floats are rejected at the boundary so that strict
inequalities keep an exact meaning.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Fraction
Vector = tuple  # tuple[Fraction, ...]

RationalLike = Union[int, str, Fraction]

_RATIONAL_RE = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")


def q(value: RationalLike) -> Fraction:
    """Coerce an int, ``"p/q"`` string or Fraction to a Fraction.

    Floats are refused: ``q(0.1)`` would silently import binary rounding.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        m = _RATIONAL_RE.match(value)
        if not m:
            raise ValueError(f"not a rational literal: {value!r}")
        num = int(m.group(1))
        den = int(m.group(2)) if m.group(2) is not None else 1
        if den == 0:
            raise ValueError(f"zero denominator in {value!r}")
        return Fraction(num, den)
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def vec(values: Iterable[RationalLike]) -> tuple:
    return tuple(q(v) for v in values)


def fmt(x: Fraction) -> str:
    """Serialize as ``"p/q"``, or ``"p"`` when the denominator is 1."""
    if isinstance(x, float):
        if x == math.inf:
            return "inf"
        if x == -math.inf:
            return "-inf"
        raise TypeError("finite floats are not serializable")
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def is_rational_literal(s: str) -> bool:
    return bool(_RATIONAL_RE.match(s))


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    s = Fraction(0)
    for x, y in zip(a, b):
        if x and y:
            s += x * y
    return s


def add(a, b) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def sub(a, b) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def scale(c, a) -> tuple:
    return tuple(c * x for x in a)


def zeros(n: int) -> tuple:
    return (Fraction(0),) * n


def unit(n: int, i: int) -> tuple:
    return tuple(Fraction(int(j == i)) for j in range(n))


def primitive(v: Sequence[Fraction]) -> tuple:
    """Scale ``v`` by a positive factor to a coprime integer vector.

    Direction vectors (rays, normals) are kept in this form so that
    arithmetic stays small and the output is canonical.
    """
    den = 1
    for x in v:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for k in ints:
        g = math.gcd(g, k)
    if g == 0:
        return tuple(Fraction(0) for _ in v)
    return tuple(Fraction(k // g) for k in ints)
