"""Exact encoding, evaluation and cylinder geometry of the difference-form
Pierce expansion

    x = 1/g1 - 1/(g1 (g1+g2)) + 1/(g1 (g1+g2) (g1+g2+g3)) - ...

with digits ``g_n >= 1``. The running sums ``q_n = g1 + ... + gn`` are the
strictly increasing denominators of the classical Pierce series.

All values are :class:`fractions.Fraction`; nothing here touches floats.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import accumulate
from typing import Iterable, Sequence

from ._validation import (
    as_rational,
    check_digits,
    check_positive_int,
    check_unit_open,
    format_digits,
)
from .exceptions import DepthShortfall, OrbitTerminated, ValidationError

__all__ = [
    "GSequence",
    "QSequence",
    "Cylinder",
    "pierce_q_digits",
    "encode",
    "evaluate",
    "partial_sums",
    "q_from_g",
    "g_from_q",
    "cylinder",
    "shift",
]


@dataclass(frozen=True)
class QSequence:
    """Strictly increasing positive denominators ``q1 < q2 < ...``."""

    digits: tuple[int, ...]
    terminated: bool = False

    def __post_init__(self):
        digits = check_digits(self.digits, "q-digits")
        for a, b in zip(digits, digits[1:]):
            if b <= a:
                raise ValidationError(
                    f"q-digits must be strictly increasing, got {a} then {b}"
                )
        object.__setattr__(self, "digits", digits)

    def __len__(self):
        return len(self.digits)

    def __iter__(self):
        return iter(self.digits)

    def __getitem__(self, item):
        return self.digits[item]


@dataclass(frozen=True)
class GSequence:
    """Difference-form digits ``g1, g2, ...`` (each ``>= 1``).

    ``terminated=True`` marks the complete expansion of a rational number;
    otherwise the digits are a prefix of a longer (possibly infinite)
    expansion. A terminated expansion is required to be the canonical one
    produced by :func:`encode`, i.e. its last digit is at least 2: the
    alternative expansion ``(..., g_n - 1, 1)`` of the same rational is
    rejected.
    """

    digits: tuple[int, ...]
    terminated: bool = False

    def __post_init__(self):
        digits = check_digits(self.digits, "g-digits")
        if self.terminated:
            if not digits:
                raise ValidationError("a terminated expansion needs at least one digit")
            if digits[-1] == 1:
                raise ValidationError(
                    "non-canonical expansion: a terminated sequence may not end in 1"
                )
        object.__setattr__(self, "digits", digits)

    def __len__(self):
        return len(self.digits)

    def __iter__(self):
        return iter(self.digits)

    def __getitem__(self, item):
        return self.digits[item]

    def __str__(self):
        return format_digits(self.digits)

    def prefix(self, depth: int) -> "GSequence":
        if depth > len(self.digits):
            raise DepthShortfall(len(self.digits), depth)
        terminated = self.terminated and depth == len(self.digits)
        return GSequence(self.digits[:depth], terminated)


@dataclass(frozen=True)
class Cylinder:
    """Closed interval of all reals whose expansion starts with ``prefix``."""

    prefix: tuple[int, ...]
    sigma: tuple[int, ...]
    left: Fraction
    right: Fraction
    length: Fraction = field(repr=False)

    @property
    def depth(self) -> int:
        return len(self.prefix)

    @property
    def midpoint(self) -> Fraction:
        return (self.left + self.right) / 2

    def __contains__(self, x) -> bool:
        x = as_rational(x)
        return self.left <= x <= self.right


def _as_g_digits(g) -> tuple[int, ...]:
    if isinstance(g, GSequence):
        return g.digits
    if isinstance(g, QSequence):
        raise ValidationError("expected g-digits, got a QSequence")
    return check_digits(g, "g-digits")


def pierce_q_digits(numerator: int, denominator: int, max_digits: int | None = None) -> list[int]:
    """Greedy Pierce digits of ``numerator/denominator`` in (0, 1).

    With ``x = p/d`` the remainder ``1 - a x`` equals ``(d mod p)/d``, so the
    denominator never changes and the whole iteration is integer division.
    Stops on a zero remainder or after ``max_digits`` digits.
    """
    p, d = numerator, denominator
    out = []
    while p and (max_digits is None or len(out) < max_digits):
        a, p = divmod(d, p)
        out.append(a)
    return out


def encode(x) -> GSequence:
    """Complete (terminated) expansion of a rational ``x`` in (0, 1).

    >>> encode("5/7").digits
    (1, 2, 4)
    """
    x = check_unit_open(as_rational(x))
    q = pierce_q_digits(x.numerator, x.denominator)
    return g_from_q(QSequence(tuple(q), terminated=True))


def q_from_g(g) -> QSequence:
    terminated = isinstance(g, GSequence) and g.terminated
    return QSequence(tuple(accumulate(_as_g_digits(g))), terminated)


def g_from_q(q) -> GSequence:
    if not isinstance(q, QSequence):
        q = QSequence(tuple(q))
    digits = q.digits
    g = tuple(b - a for a, b in zip((0,) + digits, digits))
    return GSequence(g, q.terminated)


def _series_value(q: Sequence[int]) -> Fraction:
    # nested form 1/q1 (1 - 1/q2 (1 - 1/q3 (...))), kept as integer pair
    num, den = 0, 1
    for qk in reversed(q):
        num, den = den - num, den * qk
    return Fraction(num, den)


def evaluate(g, depth: int | None = None) -> Fraction:
    """Exact partial sum of the first ``depth`` terms (all terms by default)."""
    digits = _as_g_digits(g)
    if depth is None:
        depth = len(digits)
        if depth == 0:
            raise ValidationError("cannot evaluate an empty digit sequence")
    else:
        depth = check_positive_int(depth, "depth")
        if depth > len(digits):
            raise DepthShortfall(len(digits), depth)
    return _series_value(list(accumulate(digits[:depth])))


def partial_sums(g, depth: int | None = None) -> list[Fraction]:
    """``[S_1, ..., S_depth]``; odd sums decrease, even sums increase."""
    digits = _as_g_digits(g)
    depth = len(digits) if depth is None else check_positive_int(depth, "depth")
    if depth > len(digits):
        raise DepthShortfall(len(digits), depth)
    sums = []
    total = Fraction(0)
    product = 1
    for k, sigma in enumerate(accumulate(digits[:depth])):
        product *= sigma
        term = Fraction(1, product)
        total = total + term if k % 2 == 0 else total - term
        sums.append(total)
    return sums


def cylinder(prefix: Iterable[int] | GSequence = ()) -> Cylinder:
    """Exact cylinder interval of a digit prefix.

    With ``S_k`` the depth-``k`` partial sum and
    ``L = 1/(sigma_1 ... sigma_k (sigma_k + 1))``, every continuation of the
    prefix lies between ``S_k`` and ``S_k + (-1)^k L`` (the latter is the
    partial sum after appending a digit 1). So odd-length prefixes have
    ``S_k`` as their right endpoint and even-length ones as their left.
    The empty prefix is ``[0, 1]``.
    """
    digits = _as_g_digits(prefix)
    sigma = tuple(accumulate(digits))
    s_k = _series_value(sigma) if digits else Fraction(0)
    product = 1
    for s in sigma:
        product *= s
    length = Fraction(1, product * ((sigma[-1] if sigma else 0) + 1))
    if len(digits) % 2:
        left, right = s_k - length, s_k
    else:
        left, right = s_k, s_k + length
    return Cylinder(digits, sigma, left, right, length)


def shift(g: GSequence) -> GSequence:
    """Drop the first digit: ``T(g1, g2, g3, ...) = (g2, g3, ...)``."""
    if not isinstance(g, GSequence):
        g = GSequence(check_digits(g, "g-digits"))
    if not g.digits:
        raise ValidationError("cannot shift an empty digit sequence")
    if g.terminated and len(g.digits) == 1:
        raise OrbitTerminated(f"shift of the terminated expansion ({g}) leaves nothing")
    return GSequence(g.digits[1:], g.terminated)
