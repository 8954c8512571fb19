"""Lebesgue measure of digit-restricted sets, Hausdorff covering volumes and
the measure of the sets ``A_k^i = {x : g_k(x) = i}``.

Cover sums are organised by the running digit sum ``s = c_1 + ... + c_j``.
Let ``W_j(s)`` be the sum of ``1/(sigma_1 ... sigma_j)`` over admissible
prefixes of length ``j`` ending at ``s``. Then

    W_j(s) = (1/s) * sum_{c in V_j} W_{j-1}(s - c)

and the cylinder of ``(prefix, c)`` has length
``W_{j-1}(s) / ((s + c)(s + c + 1))``, so all cylinders of one level are
summed without ever listing prefixes. Digit ranges reduce to windows of
prefix sums and infinite tails telescope:

    sum_{c >= a} 1 / ((s + c)(s + c + 1)) = 1 / (s + a).
"""
from __future__ import annotations

import enum
import math
import numbers
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import gmpy2

from ._validation import as_rational, check_positive_int, format_rational
from .exceptions import DomainError, ResourceCapExceeded, ValidationError

__all__ = [
    "LevelKind",
    "Level",
    "DigitConstraint",
    "MeasureEstimate",
    "Theorem1Series",
    "parse_constraint",
    "cover_measure",
    "theorem1_series",
    "hausdorff_alpha_volume",
    "hausdorff_ratio_threshold",
    "telescoping_tail",
    "a_k_measure",
    "DEFAULT_MAX_WORK",
]

DEFAULT_MAX_WORK = 10**7
MAX_EXACT_ALPHA_DENOMINATOR = 16


class LevelKind(enum.Enum):
    ALL = "all"
    RANGE = "range"
    TAIL = "tail"
    SET = "set"


@dataclass(frozen=True)
class Level:
    """Admissible digits at one position.

    ``RANGE`` admits ``1..param``, ``TAIL`` admits ``param+1, param+2, ...``,
    ``SET`` admits exactly ``digits`` and ``ALL`` admits every digit.
    """

    kind: LevelKind
    param: int = 0
    digits: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.kind in (LevelKind.RANGE, LevelKind.TAIL):
            check_positive_int(self.param, f"{self.kind.value} parameter")
        if self.kind is LevelKind.SET and any(d < 1 for d in self.digits):
            raise ValidationError("set digits must be >= 1")

    @classmethod
    def all(cls):
        return cls(LevelKind.ALL)

    @classmethod
    def range(cls, m):
        return cls(LevelKind.RANGE, m)

    @classmethod
    def tail(cls, v):
        return cls(LevelKind.TAIL, v)

    @classmethod
    def set(cls, digits):
        return cls(LevelKind.SET, 0, frozenset(int(d) for d in digits))

    @property
    def infinite(self) -> bool:
        return self.kind in (LevelKind.ALL, LevelKind.TAIL)

    @property
    def empty(self) -> bool:
        return self.kind is LevelKind.SET and not self.digits

    @property
    def finite_bound(self) -> int:
        if self.kind is LevelKind.RANGE:
            return self.param
        if self.kind is LevelKind.SET:
            return max(self.digits, default=0)
        return 0

    @property
    def first(self) -> int:
        """Smallest admissible digit (infinite kinds only)."""
        return self.param + 1 if self.kind is LevelKind.TAIL else 1

    def __str__(self):
        if self.kind is LevelKind.ALL:
            return "all"
        if self.kind is LevelKind.SET:
            return "set:" + ",".join(str(d) for d in sorted(self.digits))
        return f"{self.kind.value}:{self.param}"


@dataclass(frozen=True)
class DigitConstraint:
    """Per-position admissible digit sets; the last level repeats forever."""

    levels: tuple[Level, ...]

    def __post_init__(self):
        levels = tuple(self.levels)
        if not levels:
            raise ValidationError("a constraint needs at least one level")
        object.__setattr__(self, "levels", levels)

    def level(self, k: int) -> Level:
        """Admissible digits at position ``k`` (1-based)."""
        return self.levels[min(k, len(self.levels)) - 1]

    @classmethod
    def all(cls):
        return cls((Level.all(),))

    @classmethod
    def ranges(cls, bounds: Iterable[int]):
        return cls(tuple(Level.range(m) for m in bounds))

    @classmethod
    def tails(cls, bounds: Iterable[int]):
        return cls(tuple(Level.tail(v) for v in bounds))

    @classmethod
    def fixed(cls, digits: Iterable[int]):
        return cls((Level.set(digits),))

    def __str__(self):
        return "\n".join(str(level) for level in self.levels)


def _parse_level(line: str) -> Level:
    text = line.strip()
    if text == "all":
        return Level.all()
    kind, sep, arg = text.partition(":")
    kind = kind.strip()
    if not sep:
        raise ValidationError(f"bad constraint line {line!r}")
    try:
        if kind == "range":
            return Level.range(int(arg))
        if kind == "tail":
            return Level.tail(int(arg))
        if kind == "set":
            arg = arg.strip().strip("{}")
            digits = [int(a) for a in arg.split(",") if a.strip()]
            return Level.set(digits)
    except ValueError as exc:
        raise ValidationError(f"bad constraint line {line!r}") from exc
    raise ValidationError(f"unknown constraint kind {kind!r} in {line!r}")


def parse_constraint(text: str) -> DigitConstraint:
    """Parse the plain-text constraint format.

    One level per line: ``range:m``, ``tail:v``, ``set:a,b,c`` or ``all``.
    Blank lines and ``#`` comments are ignored; the last line repeats.
    """
    levels = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            levels.append(_parse_level(line))
    if not levels:
        raise ValidationError("constraint file has no levels")
    return DigitConstraint(tuple(levels))


@dataclass(frozen=True)
class MeasureEstimate:
    """Two-sided bound ``lower <= measure <= upper``.

    ``lower`` is the total length of admissible cylinders with all digits at
    most ``cutoff``; ``upper`` adds the exact mass of the cylinders where an
    admissible digit first exceeds ``cutoff``. ``exact`` is False when the
    sums were carried in directed-rounding fixed point.
    """

    lower: Fraction
    upper: Fraction
    depth: int
    cutoff: int | None
    exact: bool = True
    empty_level: int | None = None
    work: int = field(default=0, compare=False)

    def __post_init__(self):
        if not 0 <= self.lower <= self.upper <= 1:
            raise ValueError(f"inconsistent estimate {self.lower} .. {self.upper}")

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def to_dict(self) -> dict:
        return {
            "lower": format_rational(self.lower),
            "upper": format_rational(self.upper),
            "depth": self.depth,
            "cutoff": self.cutoff,
            "exact": self.exact,
            "empty_level": self.empty_level,
        }


# -- number backends for the level recursion ---------------------------------


class _Exact:
    exact = True

    def zero(self):
        return gmpy2.mpq(0)

    def one(self):
        return gmpy2.mpq(1)

    def scale(self, x, num: int, den: int):
        return x * num / den

    def is_zero(self, x) -> bool:
        return x == 0

    def bounds(self, x) -> tuple[Fraction, Fraction]:
        f = Fraction(int(x.numerator), int(x.denominator))
        return f, f


class _Directed:
    """Interval arithmetic on integers scaled by ``2**bits``.

    Each value is a pair ``(lo, hi)`` with ``lo <= 2**bits * v <= hi``;
    additions are exact and divisions round outward, so the final bounds are
    rigorous.
    """

    exact = False

    def __init__(self, bits: int):
        self.bits = check_positive_int(bits, "precision")

    def zero(self):
        return (0, 0)

    def one(self):
        return (1 << self.bits, 1 << self.bits)

    def scale(self, x, num: int, den: int):
        lo, hi = x
        return ((lo * num) // den, -((-hi * num) // den))

    def is_zero(self, x) -> bool:
        return x == (0, 0)

    def bounds(self, x) -> tuple[Fraction, Fraction]:
        return Fraction(x[0], 1 << self.bits), Fraction(x[1], 1 << self.bits)


def _add(backend, a, b):
    if backend.exact:
        return a + b
    return (a[0] + b[0], a[1] + b[1])


def _sub(backend, a, b):
    if backend.exact:
        return a - b
    return (a[0] - b[1], a[1] - b[0])


def _prefix_sums(backend, weights: dict[int, object], hi: int) -> list:
    acc = backend.zero()
    out = [acc]
    for s in range(hi + 1):
        w = weights.get(s)
        if w is not None:
            acc = _add(backend, acc, w)
        out.append(acc)
    return out


def _window(backend, prefix: list, lo_s: int, hi_s: int, a: int, b: int):
    """Sum of weights with ``a <= s <= b``, clipped to the support."""
    a, b = max(a, lo_s), min(b, hi_s)
    if a > b:
        return None
    return _sub(backend, prefix[b + 1], prefix[a])


def _truncated_interval(level: Level, cutoff: int) -> tuple[int, int] | None:
    """Admissible digits ``<= cutoff`` as a contiguous ``[a, b]``, if they are."""
    if level.kind is LevelKind.RANGE:
        return 1, level.param
    if level.kind in (LevelKind.ALL, LevelKind.TAIL):
        a = level.first
        return (a, cutoff) if a <= cutoff else None
    return None


def _check_cutoff(constraint: DigitConstraint, depth: int, cutoff: int | None) -> None:
    for k in range(1, depth + 1):
        level = constraint.level(k)
        if level.infinite and cutoff is None:
            raise ValidationError(f"level {k} ({level}) is infinite: a cutoff is required")
        if cutoff is not None and level.finite_bound > cutoff:
            raise ValidationError(
                f"cutoff {cutoff} is below the largest admissible digit "
                f"{level.finite_bound} at level {k}"
            )


def cover_measure(
    constraint: DigitConstraint,
    depth: int,
    cutoff: int | None = None,
    precision: int | None = None,
    max_work: int = DEFAULT_MAX_WORK,
) -> MeasureEstimate:
    """Measure of ``{x : g_j(x) in V_j for j <= depth}``.

    ``cutoff`` truncates infinite admissible sets; the mass beyond it is
    added to ``upper`` exactly. ``precision=None`` sums exact rationals,
    an integer runs the same recursion in directed-rounding fixed point with
    that many fractional bits (much faster for large cutoffs).
    ``max_work`` caps the number of state updates.
    """
    depth = check_positive_int(depth, "depth")
    if cutoff is not None:
        cutoff = check_positive_int(cutoff, "cutoff")
    _check_cutoff(constraint, depth, cutoff)
    for k in range(1, depth + 1):
        if constraint.level(k).empty:
            return MeasureEstimate(Fraction(0), Fraction(0), depth, cutoff, True, empty_level=k)

    backend = _Exact() if precision is None else _Directed(precision)
    weights = {0: backend.one()}
    excess = backend.zero()
    lower = backend.zero()
    work = 0

    def charge(n):
        nonlocal work
        work += n
        if work > max_work:
            raise ResourceCapExceeded(
                f"cover computation exceeds {max_work} state updates "
                f"(depth {depth}, cutoff {cutoff})"
            )

    for k in range(1, depth + 1):
        level = constraint.level(k)
        lo_s, hi_s = min(weights), max(weights)
        last = k == depth

        if level.infinite:
            # mass of the cylinders whose k-th digit is admissible and > cutoff
            start = max(cutoff + 1, level.first)
            charge(len(weights))
            for s, w in weights.items():
                excess = _add(backend, excess, backend.scale(w, 1, s + start))

        interval = _truncated_interval(level, cutoff)
        if last:
            charge(len(weights) * (len(level.digits) if interval is None else 1))
            for s, w in weights.items():
                if interval is not None:
                    a, b = interval
                    # sum_{c=a}^{b} 1/((s+c)(s+c+1)) = (b-a+1) / ((s+a)(s+b+1))
                    term = backend.scale(w, b - a + 1, (s + a) * (s + b + 1))
                elif level.kind is LevelKind.SET:
                    term = backend.zero()
                    for c in level.digits:
                        term = _add(backend, term, backend.scale(w, 1, (s + c) * (s + c + 1)))
                else:
                    continue
                lower = _add(backend, lower, term)
            break

        new = {}
        if interval is not None:
            a, b = interval
            prefix = _prefix_sums(backend, weights, hi_s)
            charge(hi_s + b - lo_s - a + 1)
            for t in range(lo_s + a, hi_s + b + 1):
                total = _window(backend, prefix, lo_s, hi_s, t - b, t - a)
                if total is not None and not backend.is_zero(total):
                    new[t] = backend.scale(total, 1, t)
        elif level.kind is LevelKind.SET:
            digits = sorted(level.digits)
            charge(len(weights) * len(digits))
            for s, w in weights.items():
                for c in digits:
                    t = s + c
                    new[t] = _add(backend, new[t], w) if t in new else w
            new = {t: backend.scale(v, 1, t) for t, v in sorted(new.items())}
        weights = new
        if not weights:
            break

    lower_lo, lower_hi = backend.bounds(lower)
    _, excess_hi = backend.bounds(excess)
    upper = min(Fraction(1), lower_hi + excess_hi)
    return MeasureEstimate(lower_lo, upper, depth, cutoff, backend.exact, work=work)


# -- growth conditions for range constraints ---------------------------------


@dataclass(frozen=True)
class Theorem1Series:
    """Partial sums deciding the measure of ``{g_k <= m_k for all k}``.

    ``growth``: ``sum_{k<=K} (m_1 + ... + m_k) / m_{k+1}``; finite limit
    means positive measure. ``density``: ``sum_{k<=K} k / m_k``; infinite
    limit means measure zero.
    """

    growth: Fraction
    density: Fraction
    terms: int
    growth_partials: tuple[Fraction, ...] = field(repr=False)
    density_partials: tuple[Fraction, ...] = field(repr=False)


def _bound_sequence(m, count: int) -> list[int]:
    if callable(m):
        values = [m(k) for k in range(1, count + 1)]
    else:
        values = list(m)
        if len(values) < count:
            raise ValidationError(f"need {count} level bounds, got {len(values)}")
        values = values[:count]
    for v in values:
        check_positive_int(v, "level bound")
    return [int(v) for v in values]


def theorem1_series(m: Sequence[int] | Callable[[int], int], terms: int) -> Theorem1Series:
    """``m`` is a sequence ``m_1, m_2, ...`` or a function ``k -> m_k``;
    ``terms + 1`` bounds are needed."""
    terms = check_positive_int(terms, "terms")
    values = _bound_sequence(m, terms + 1)
    growth, density = Fraction(0), Fraction(0)
    gp, dp = [], []
    running = 0
    for k in range(1, terms + 1):
        running += values[k - 1]
        growth += Fraction(running, values[k])
        density += Fraction(k, values[k - 1])
        gp.append(growth)
        dp.append(density)
    return Theorem1Series(growth, density, terms, tuple(gp), tuple(dp))


# -- Hausdorff volumes of the bounded-digit sets -----------------------------


def _check_alpha(alpha) -> Fraction:
    alpha = as_rational(alpha)
    if not 0 < alpha <= 1:
        raise DomainError(f"alpha must lie in (0, 1], got {format_rational(alpha)}")
    return alpha


def hausdorff_alpha_volume(n: int, alpha, k: int, precision: int = 256) -> Fraction:
    """``n**k * (1/(k! (k+1)))**alpha``: the alpha-volume of the cover of
    ``{x : all digits <= n}`` by its ``n**k`` cylinders of depth ``k``.

    Exact when the power is rational (alpha = 1, or the root is exact).
    Otherwise alpha must have denominator at most 16 and the result is an
    upper bound within a relative ``2**-precision`` of the true value.
    """
    n = check_positive_int(n, "n")
    k = check_positive_int(k, "k")
    alpha = _check_alpha(alpha)
    a, d = alpha.numerator, alpha.denominator
    if d > MAX_EXACT_ALPHA_DENOMINATOR:
        raise DomainError(
            f"alpha denominator {d} exceeds {MAX_EXACT_ALPHA_DENOMINATOR}; "
            "approximate alpha by a nearby rational from above"
        )
    base = math.factorial(k) * (k + 1)
    power = base**a
    root, is_exact = gmpy2.iroot(gmpy2.mpz(power), d)
    if is_exact:
        return Fraction(n**k, int(root))
    # floor of the scaled root under-estimates base**alpha, so this over-estimates
    scaled, _ = gmpy2.iroot(gmpy2.mpz(power) << (d * precision), d)
    return Fraction(n**k << precision, int(scaled))


def hausdorff_ratio_threshold(n: int, alpha) -> int:
    """Smallest ``k`` from which the alpha-volumes strictly decrease.

    Consecutive volumes have ratio ``n / (k+2)**alpha``, which is below 1
    exactly when ``(k+2)**a > n**d`` for ``alpha = a/d``.
    """
    n = check_positive_int(n, "n")
    alpha = _check_alpha(alpha)
    a, d = alpha.numerator, alpha.denominator
    target = n**d
    # (k+2)**a > target  <=>  k+2 > target**(1/a)
    root, _ = gmpy2.iroot(gmpy2.mpz(target), a)
    return max(1, int(root) - 1)


# -- the sets A_k^i ----------------------------------------------------------


def telescoping_tail(s: int, order: int) -> Fraction:
    """Closed form of ``sum_{m > s} 1 / (m (m+1) ... (m+order))``.

    Equal to ``1 / (order * (s+1)(s+2)...(s+order))``; ``order=2`` is the
    identity behind the ``A_k^1`` computation.
    """
    order = check_positive_int(order, "order")
    if isinstance(s, bool) or not isinstance(s, numbers.Integral) or s < 0:
        raise ValidationError(f"s must be a non-negative integer, got {s!r}")
    denom = order
    for j in range(1, order + 1):
        denom *= s + j
    return Fraction(1, denom)


def _a_k1_exact(k: int) -> Fraction:
    # A_k^1 is the sum over c_1..c_{k-1} of 1/(sigma_1...sigma_{k-1}(s+1)(s+2)),
    # s = sigma_{k-1}. Summing the innermost digit (m = s, previous sum t) is
    #   sum_{m>t} 1/(m(m+1)(m+2)) = telescoping_tail(t, 2) = (1/2) / ((t+1)(t+2)),
    # the same shape one level up times a factor independent of t.
    # Peel k-1 levels, then close with the empty prefix (t = 0).
    coefficient = Fraction(1)
    for _ in range(k - 1):
        t = 0  # the factor does not depend on t
        coefficient *= telescoping_tail(t, 2) * (t + 1) * (t + 2)
    return coefficient / ((0 + 1) * (0 + 2))


def a_k_measure(
    digit: int,
    k: int,
    cutoff: int | None = None,
    precision: int | None = None,
    max_work: int = DEFAULT_MAX_WORK,
) -> MeasureEstimate:
    """Lebesgue measure of ``{x : g_k(x) = digit}``.

    Without ``cutoff`` only ``digit == 1`` is supported and the value is
    exact. With a cutoff the earlier digits are truncated at it; ``upper``
    is additionally capped by the measure for digit 1, since cylinders ending
    in 1 are the longest.
    """
    digit = check_positive_int(digit, "digit")
    k = check_positive_int(k, "k")
    if cutoff is None:
        if digit != 1:
            raise ValidationError("exact mode is available for digit 1 only; pass a cutoff")
        value = _a_k1_exact(k)
        return MeasureEstimate(value, value, k, None, True)
    constraint = DigitConstraint((Level.all(),) * (k - 1) + (Level.set([digit]),))
    estimate = cover_measure(constraint, k, cutoff, precision, max_work)
    cap = _a_k1_exact(k)
    return MeasureEstimate(
        min(estimate.lower, cap),
        min(estimate.upper, cap),
        k,
        cutoff,
        estimate.exact,
        work=estimate.work,
    )
