"""Digit counts, Birkhoff averages and frequency experiments for the shift.

Uniformly random reals are represented by dyadic rationals ``p / 2**bits``
so that every digit is computed exactly.
"""
from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from ._validation import (
    as_rational,
    check_positive_int,
    check_seed,
    check_unit_open,
    format_digits,
    format_rational,
)
from .exceptions import DepthShortfall, ValidationError
from .expansion import GSequence, pierce_q_digits, shift
from .rng import UNIFORM_STREAM, randbelow, sample_generator

__all__ = [
    "DigitStats",
    "UniformSampler",
    "FrequencyReport",
    "leading_digits",
    "digit_stats",
    "frequency_experiment",
    "birkhoff_average",
]


@dataclass(frozen=True)
class DigitStats:
    depth: int
    counts: dict[int, int]
    max_digit: int

    def count(self, digit: int) -> int:
        return self.counts.get(digit, 0)

    def frequency(self, digit: int) -> Fraction:
        return Fraction(self.count(digit), self.depth)


@dataclass(frozen=True)
class UniformSampler:
    """Dyadic stand-in for a Lebesgue-random point of (0, 1).

    Sample ``index`` is ``p / 2**bits`` with ``p`` uniform on
    ``1 .. 2**bits - 1``, drawn from its own seeded stream.
    """

    bits: int = 1024
    seed: int = 0

    def __post_init__(self):
        check_positive_int(self.bits, "bits")
        check_seed(self.seed)

    def sample(self, index: int) -> Fraction:
        gen = sample_generator(self.seed, UNIFORM_STREAM, index)
        p = 1 + randbelow(gen, 2**self.bits - 1)
        return Fraction(p, 2**self.bits)

    def draw(self, n: int, start: int = 0) -> list[Fraction]:
        return [self.sample(i) for i in range(start, start + n)]


def leading_digits(x, depth: int) -> tuple[int, ...]:
    """First ``depth`` g-digits of a rational ``x`` in (0, 1).

    Raises :class:`DepthShortfall` if the expansion is shorter.
    """
    x = check_unit_open(as_rational(x))
    depth = check_positive_int(depth, "depth")
    q = pierce_q_digits(x.numerator, x.denominator, depth)
    if len(q) < depth:
        raise DepthShortfall(len(q), depth)
    return tuple(b - a for a, b in zip([0] + q, q))


def digit_stats(x, depth: int) -> DigitStats:
    digits = leading_digits(x, depth)
    return DigitStats(depth, dict(sorted(Counter(digits).items())), max(digits))


def birkhoff_average(g, digit: int, n: int) -> Fraction:
    """``(1/n) sum_{j<n} 1[T^j x in cylinder (digit)]`` along the shift orbit."""
    if not isinstance(g, GSequence):
        g = GSequence(tuple(g))
    n = check_positive_int(n, "n")
    if len(g) < n:
        raise DepthShortfall(len(g), n)
    hits = 0
    point = g
    for j in range(n):
        hits += point[0] == digit
        if j < n - 1:
            point = shift(point)
    return Fraction(hits, n)


@dataclass(frozen=True)
class SampleRow:
    index: int
    depth_reached: int
    count: int | None
    max_digit: int | None
    digits: tuple[int, ...]

    @property
    def excluded(self) -> bool:
        return self.count is None


def _percentile(values: list[int], q: float) -> int | None:
    """Inverted-CDF percentile: smallest value with at least q% of mass at or below."""
    if not values:
        return None
    ordered = sorted(values)
    rank = max(1, math.ceil(q / 100 * len(ordered)))
    return ordered[rank - 1]


def _frequency_rows(args) -> list[SampleRow]:
    bits, seed, depth, digit, start, stop = args
    sampler = UniformSampler(bits, seed)
    rows = []
    for index in range(start, stop):
        x = sampler.sample(index)
        q = pierce_q_digits(x.numerator, x.denominator, depth)
        g = tuple(b - a for a, b in zip([0] + q, q))
        if len(g) < depth:
            rows.append(SampleRow(index, len(g), None, None, g))
        else:
            rows.append(SampleRow(index, depth, g.count(digit), max(g), g))
    return rows


def run_chunked(func, make_args, samples: int, workers: int) -> list:
    """Evaluate ``func`` over index chunks and concatenate in index order."""
    workers = max(1, int(workers))
    chunk = max(1, -(-samples // (4 * workers)))
    bounds = [(i, min(i + chunk, samples)) for i in range(0, samples, chunk)]
    jobs = [make_args(a, b) for a, b in bounds]
    if workers == 1 or len(jobs) == 1:
        parts = [func(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(func, jobs))
    return [row for part in parts for row in part]


@dataclass(frozen=True)
class FrequencyReport:
    """Outcome of :func:`frequency_experiment`.

    Means are exact rationals over the non-excluded samples; samples whose
    expansion ended before ``depth`` digits are excluded and counted.
    """

    config: dict
    rows: list[SampleRow] = field(repr=False)

    @property
    def counts(self) -> list[int]:
        return [r.count for r in self.rows if not r.excluded]

    @property
    def excluded(self) -> int:
        return sum(r.excluded for r in self.rows)

    @property
    def mean_count(self) -> Fraction | None:
        counts = self.counts
        return Fraction(sum(counts), len(counts)) if counts else None

    @property
    def mean_frequency(self) -> Fraction | None:
        mean = self.mean_count
        return None if mean is None else mean / self.config["depth"]

    @property
    def max_count(self) -> int | None:
        counts = self.counts
        return max(counts) if counts else None

    def percentile(self, q: float) -> int | None:
        return _percentile(self.counts, q)

    def max_digit_percentile(self, q: float = 50) -> int | None:
        # max digits can exceed float range, so no numpy here
        return _percentile([r.max_digit for r in self.rows if not r.excluded], q)

    def summary(self) -> dict:
        def rat(v):
            return None if v is None else format_rational(v)

        return {
            "config": dict(self.config),
            "samples": len(self.rows),
            "used": len(self.rows) - self.excluded,
            "excluded": self.excluded,
            "mean_count": rat(self.mean_count),
            "mean_frequency": rat(self.mean_frequency),
            "max_count": self.max_count,
            "percentiles": {
                "p50": self.percentile(50),
                "p90": self.percentile(90),
                "p99": self.percentile(99),
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["index", "depth_reached", "excluded", "count", "max_digit", "digits"])
        for r in self.rows:
            writer.writerow([
                r.index,
                r.depth_reached,
                int(r.excluded),
                "" if r.count is None else r.count,
                "" if r.max_digit is None else r.max_digit,
                format_digits(r.digits),
            ])
        return buf.getvalue()


def frequency_experiment(
    sampler: UniformSampler,
    samples: int,
    depth: int,
    digit: int,
    workers: int = 1,
) -> FrequencyReport:
    """Count occurrences of ``digit`` among the first ``depth`` digits of
    ``samples`` uniform points.

    A pure function of ``(sampler.seed, sampler.bits, samples, depth,
    digit)``; ``workers`` only changes wall-clock time.
    """
    samples = check_positive_int(samples, "samples")
    depth = check_positive_int(depth, "depth")
    digit = check_positive_int(digit, "digit")
    if not isinstance(sampler, UniformSampler):
        raise ValidationError("sampler must be a UniformSampler")
    rows = run_chunked(
        _frequency_rows,
        lambda a, b: (sampler.bits, sampler.seed, depth, digit, a, b),
        samples,
        workers,
    )
    config = {
        "seed": sampler.seed,
        "bits": sampler.bits,
        "samples": samples,
        "depth": depth,
        "digit": digit,
    }
    return FrequencyReport(config, rows)
