"""Exact rational helpers.

Public values are ``fractions.Fraction``. Inner loops of the linear algebra
run on ``gmpy2.mpq``, which compares and hashes equal to ``Fraction``.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from fractions import Fraction
from typing import Union

from gmpy2 import mpq

from .errors import ValidationError, ZeroVector

RatLike = Union[int, str, Fraction, "mpq"]
Vector = tuple[Fraction, ...]


def rat(value: RatLike) -> Fraction:
    """Parse an int, a ``"p/q"`` string, a Fraction or an mpq."""
    if isinstance(value, Fraction):
        if type(value.numerator) is int and type(value.denominator) is int:
            return value
        # Fraction(mpq) keeps gmpy2 integers inside, which mpq() later rejects
        return Fraction(int(value.numerator), int(value.denominator))
    if isinstance(value, bool):
        raise ValidationError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError as exc:
            raise ValidationError(f"not a rational: {value!r}") from exc
    if isinstance(value, float):
        raise ValidationError(f"floats are not accepted as exact input: {value!r}")
    try:
        return Fraction(int(value.numerator), int(value.denominator))
    except AttributeError as exc:
        raise ValidationError(f"not a rational: {value!r}") from exc


def fmt(value: Fraction) -> str:
    return str(value)


def vec(values: Iterable[RatLike]) -> Vector:
    return tuple(rat(v) for v in values)


def to_mpq(values: Iterable[RatLike]) -> list[mpq]:
    return [mpq(v) for v in values]


def from_mpq(values: Iterable[mpq]) -> Vector:
    return tuple(Fraction(int(v.numerator), int(v.denominator)) for v in values)


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v) if a and b), Fraction(0))


def primitive_normal(v: Sequence[RatLike]) -> tuple[int, ...]:
    """Scale ``v`` to a primitive integer vector whose first nonzero entry is positive."""
    ints = integer_direction(v)
    lead = next(x for x in ints if x)
    return tuple(-x for x in ints) if lead < 0 else ints


def integer_direction(v: Sequence[RatLike]) -> tuple[int, ...]:
    """Primitive integer vector with the same direction as ``v``."""
    fr = [rat(x) for x in v]
    if not any(fr):
        raise ZeroVector("zero vector has no normal direction")
    den = math.lcm(*(x.denominator for x in fr))
    ints = [int(x * den) for x in fr]
    g = math.gcd(*ints)
    return tuple(x // g for x in ints)


def normalize_halfspace(row: Sequence[RatLike], rhs: RatLike) -> tuple[tuple[int, ...], Fraction]:
    """Rescale ``<row, x> >= rhs`` by a positive factor to a primitive integer normal."""
    fr = [rat(x) for x in row]
    if not any(fr):
        raise ZeroVector("halfspace with zero normal")
    normal = integer_direction(fr)
    k = next(n / r for n, r in zip(normal, fr) if r)
    return normal, rat(rhs) * k
