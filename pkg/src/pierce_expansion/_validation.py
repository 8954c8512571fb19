"""Parsing, formatting and argument checks for exact numbers and digit lists.

Rationals travel as ``"numerator/denominator"`` strings and digit sequences
as comma separated positive integers.
"""
from __future__ import annotations

import numbers
from fractions import Fraction
from typing import Iterable

from .exceptions import DomainError, ValidationError


def as_rational(value) -> Fraction:
    """Coerce ``value`` to an exact :class:`~fractions.Fraction`.

    Accepts Fractions, ints, ``numbers.Rational`` instances (gmpy2 mpq
    included), strings such as ``"2/5"`` or ``"0.25"``, and finite floats,
    which are converted exactly to their dyadic value.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValidationError(f"not a rational number: {value!r}")
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, numbers.Rational):
        return Fraction(int(value.numerator), int(value.denominator))
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ValidationError(f"not a finite number: {value!r}")
        return Fraction(value)
    # numpy scalars and friends
    if hasattr(value, "item"):
        return as_rational(value.item())
    raise ValidationError(f"not a rational number: {value!r}")


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if not text:
        raise ValidationError("empty rational")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"cannot parse rational {text!r}") from exc


def format_rational(value) -> str:
    value = as_rational(value)
    return f"{value.numerator}/{value.denominator}"


def parse_digits(text: str) -> tuple[int, ...]:
    """Parse ``"2,3,7"`` into ``(2, 3, 7)``; the empty string gives ``()``."""
    text = text.strip()
    if not text:
        return ()
    digits = []
    for part in text.split(","):
        part = part.strip()
        try:
            digits.append(int(part))
        except ValueError as exc:
            raise ValidationError(f"bad digit {part!r} in {text!r}") from exc
    return check_digits(digits)


def format_digits(digits: Iterable[int]) -> str:
    return ",".join(str(int(d)) for d in digits)


def check_digits(digits: Iterable[int], name: str = "digits") -> tuple[int, ...]:
    out = []
    for d in digits:
        if isinstance(d, bool) or not isinstance(d, numbers.Integral):
            raise ValidationError(f"{name} must be integers, got {d!r}")
        d = int(d)
        if d < 1:
            raise ValidationError(f"{name} must be >= 1, got {d}")
        out.append(d)
    return tuple(out)


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ValidationError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_unit_open(x: Fraction, name: str = "x") -> Fraction:
    if not 0 < x < 1:
        raise DomainError(f"{name} must lie in (0, 1), got {format_rational(x)}")
    return x


def check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, numbers.Integral):
        raise ValidationError(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValidationError(f"seed must fit in 64 unsigned bits, got {seed}")
    return seed
