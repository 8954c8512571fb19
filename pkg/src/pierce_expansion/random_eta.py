"""Random Pierce series with independent digits.

``eta = O(eta_1, eta_2, ...)`` where ``eta_k`` is drawn from row ``k`` of a
stochastic matrix. Samples are kept as digit prefixes together with their
enclosing cylinder; the cylinder width is the resolution of every
diagnostic computed from them.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from scipy import stats

from ._validation import (
    as_rational,
    check_positive_int,
    check_seed,
    format_digits,
    format_rational,
    parse_rational,
)
from .dynamics import UniformSampler, frequency_experiment, run_chunked
from .exceptions import ValidationError
from .expansion import Cylinder, GSequence, cylinder
from .rng import ETA_STREAM, bernoulli, randbelow, sample_generator

__all__ = [
    "DigitDistribution",
    "StochasticMatrix",
    "Purity",
    "PurityVerdict",
    "EtaSample",
    "SingularityReport",
    "parse_matrix",
    "sample_eta",
    "sample_eta_batch",
    "discreteness_criterion",
    "invariance_check",
    "ks_uniform",
    "ks_critical_value",
    "singularity_experiment",
]


@dataclass(frozen=True)
class DigitDistribution:
    """Law of one digit: explicit ``head`` probabilities for ``1..M`` plus an
    optional geometric tail.

    With tail ratio ``r`` the leftover mass ``t = 1 - sum(head)`` is spread
    as ``P(M + j) = t (1 - r) r**(j-1)``, so total mass is exactly 1.
    Without a tail the head must sum to 1.
    """

    head: tuple[Fraction, ...]
    ratio: Fraction | None = None

    def __post_init__(self):
        head = tuple(as_rational(p) for p in self.head)
        if any(p < 0 for p in head):
            raise ValidationError("probabilities must be non-negative")
        total = sum(head, Fraction(0))
        ratio = None if self.ratio is None else as_rational(self.ratio)
        if ratio is None:
            if total != 1:
                raise ValidationError(
                    f"probabilities sum to {format_rational(total)}, not 1"
                )
        else:
            if not 0 <= ratio < 1:
                raise ValidationError("geometric ratio must lie in [0, 1)")
            if total > 1:
                raise ValidationError("head probabilities exceed 1")
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "ratio", ratio)

    @classmethod
    def geometric(cls, ratio="1/2"):
        """``P(m) = (1 - r) r**(m-1)``; ``r = 1/2`` gives ``2**-m``."""
        return cls((), ratio)

    @classmethod
    def point(cls, digit: int):
        digit = check_positive_int(digit, "digit")
        return cls((Fraction(0),) * (digit - 1) + (Fraction(1),))

    @property
    def tail_mass(self) -> Fraction:
        return 1 - sum(self.head, Fraction(0))

    @property
    def support_max(self) -> int | None:
        """Largest digit with positive probability; None if unbounded."""
        if self.ratio is not None and self.tail_mass > 0:
            return None
        positive = [m for m, p in enumerate(self.head, 1) if p > 0]
        return max(positive)

    def prob(self, m: int) -> Fraction:
        if m < 1:
            return Fraction(0)
        if m <= len(self.head):
            return self.head[m - 1]
        if self.ratio is None:
            return Fraction(0)
        j = m - len(self.head)
        return self.tail_mass * (1 - self.ratio) * self.ratio ** (j - 1)

    def mass_above(self, cutoff: int) -> Fraction:
        """``P(digit > cutoff)``, exactly."""
        if cutoff < len(self.head):
            return self.tail_mass + sum(self.head[cutoff:], Fraction(0))
        if self.ratio is None:
            return Fraction(0)
        return self.tail_mass * self.ratio ** (cutoff - len(self.head))

    def max_prob(self) -> Fraction:
        candidates = list(self.head)
        if self.ratio is not None:
            candidates.append(self.tail_mass * (1 - self.ratio))
        return max(candidates)

    def sample(self, gen) -> int:
        head_den = math.lcm(*(p.denominator for p in self.head)) if self.head else 1
        u = randbelow(gen, head_den)
        acc = 0
        for m, p in enumerate(self.head, 1):
            acc += p.numerator * (head_den // p.denominator)
            if u < acc:
                return m
        # u landed in the tail mass: geometric number of extra steps
        m = len(self.head) + 1
        while bernoulli(gen, self.ratio):
            m += 1
        return m

    def __str__(self):
        parts = [format_rational(p) for p in self.head]
        if self.ratio is not None:
            parts.append("geom:" + format_rational(self.ratio))
        return " ".join(parts)


def _parse_row(line: str) -> DigitDistribution:
    head, ratio = [], None
    for token in line.split():
        if token.startswith("geom:"):
            if ratio is not None:
                raise ValidationError(f"two geometric tails in {line!r}")
            ratio = parse_rational(token[5:])
        elif ratio is not None:
            raise ValidationError(f"probabilities after the geometric tail in {line!r}")
        else:
            head.append(parse_rational(token))
    return DigitDistribution(tuple(head), ratio)


@dataclass(frozen=True)
class StochasticMatrix:
    """Digit laws per position.

    Either a finite list of ``rows`` whose last row repeats forever, or a
    ``row_function(k)`` giving the law of digit ``k`` (1-based) for
    non-stationary configurations.
    """

    rows: tuple[DigitDistribution, ...] = ()
    row_function: Callable[[int], DigitDistribution] | None = field(default=None, compare=False)

    def __post_init__(self):
        rows = tuple(self.rows)
        if bool(rows) == (self.row_function is not None):
            raise ValidationError("give either rows or a row_function")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def iid(cls, distribution: DigitDistribution):
        return cls((distribution,))

    @classmethod
    def from_function(cls, function: Callable[[int], DigitDistribution]):
        return cls(row_function=function)

    @property
    def stationary(self) -> bool:
        return self.row_function is None

    @property
    def iid_law(self) -> DigitDistribution | None:
        return self.rows[0] if len(self.rows) == 1 else None

    def row(self, k: int) -> DigitDistribution:
        if self.row_function is not None:
            row = self.row_function(k)
            if not isinstance(row, DigitDistribution):
                raise ValidationError(f"row {k} is not a DigitDistribution")
            return row
        return self.rows[min(k, len(self.rows)) - 1]

    def describe(self) -> list[str] | str:
        if self.row_function is not None:
            return "function"
        return [str(r) for r in self.rows]


def parse_matrix(text: str) -> StochasticMatrix:
    """One row per line: ``p1 p2 ... pM [geom:r]`` with exact rationals.

    The last row repeats; blank lines and ``#`` comments are skipped.
    """
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(_parse_row(line))
    if not rows:
        raise ValidationError("matrix file has no rows")
    return StochasticMatrix(tuple(rows))


# -- sampling ----------------------------------------------------------------


@dataclass(frozen=True)
class EtaSample:
    index: int
    digits: GSequence
    cylinder: Cylinder


def _draw_digits(matrix: StochasticMatrix, depth: int, seed: int, index: int) -> tuple[int, ...]:
    gen = sample_generator(seed, ETA_STREAM, index)
    return tuple(matrix.row(k).sample(gen) for k in range(1, depth + 1))


def sample_eta(matrix: StochasticMatrix, depth: int, seed: int, index: int = 0) -> EtaSample:
    """Draw the first ``depth`` digits of one realisation of eta.

    The realised value lies in the returned cylinder, whose width is at most
    ``1/(depth! (depth+1))``.
    """
    depth = check_positive_int(depth, "depth")
    seed = check_seed(seed)
    digits = _draw_digits(matrix, depth, seed, index)
    return EtaSample(index, GSequence(digits), cylinder(digits))


def _eta_chunk(args) -> list[EtaSample]:
    matrix, depth, seed, start, stop = args
    return [sample_eta(matrix, depth, seed, i) for i in range(start, stop)]


def sample_eta_batch(
    matrix: StochasticMatrix, depth: int, samples: int, seed: int, workers: int = 1
) -> list[EtaSample]:
    samples = check_positive_int(samples, "samples")
    if not matrix.stationary and workers > 1:
        workers = 1  # row functions are usually lambdas; keep them in-process
    return run_chunked(_eta_chunk, lambda a, b: (matrix, depth, seed, a, b), samples, workers)


# -- purity ------------------------------------------------------------------


class Purity(enum.Enum):
    DISCRETE = "discrete"
    SINGULAR_CONTINUOUS = "singular-continuous"
    UNDETERMINED = "undetermined"
    # no absolutely continuous class: random Pierce series never have one


@dataclass(frozen=True)
class PurityVerdict:
    purity: Purity
    witness: dict

    def to_dict(self) -> dict:
        return {"class": self.purity.value, "witness": self.witness}


def discreteness_criterion(matrix: StochasticMatrix, horizon: int) -> PurityVerdict:
    """Classify the law of eta from ``prod_k max_i p_ik``.

    eta is purely atomic iff that product is positive. For a stationary tail
    the product vanishes iff the tail row has no certain digit; a continuous
    law is then singular, because some digit has positive probability in
    every tail row and the digit sums diverge. Non-stationary matrices are
    reported as undetermined with the partial values at ``horizon``.
    """
    horizon = check_positive_int(horizon, "horizon")
    product = Fraction(1)
    partials = []
    for k in range(1, horizon + 1):
        product *= matrix.row(k).max_prob()
        partials.append(format_rational(product))
    witness = {
        "horizon": horizon,
        "max_product": format_rational(product),
        "max_product_partials": partials,
    }
    if not matrix.stationary:
        return PurityVerdict(Purity.UNDETERMINED, witness)
    tail_max = matrix.rows[-1].max_prob()
    witness["tail_max"] = format_rational(tail_max)
    if tail_max == 1:
        # product settles at its value after the last configured row
        settled = Fraction(1)
        for row in matrix.rows:
            settled *= row.max_prob()
        witness["limit_product"] = format_rational(settled)
        return PurityVerdict(Purity.DISCRETE, witness)
    tail = matrix.rows[-1]
    i0 = next(m for m in range(1, len(tail.head) + 2) if tail.prob(m) > 0)
    witness["limit_product"] = "0/1"
    witness["divergent_digit"] = i0
    return PurityVerdict(Purity.SINGULAR_CONTINUOUS, witness)


def invariance_check(p: DigitDistribution, prefix, cutoff: int) -> Fraction:
    """``|mu(D) - sum_{i <= cutoff} mu(i D)|`` for the cylinder ``D`` of
    ``prefix`` under the iid law ``p``; equals ``mu(D) * P(digit > cutoff)``."""
    cutoff = check_positive_int(cutoff, "cutoff")
    digits = prefix.digits if isinstance(prefix, GSequence) else tuple(prefix)
    mass = Fraction(1)
    for c in digits:
        mass *= p.prob(c)
    preimage = sum((p.prob(i) * mass for i in range(1, cutoff + 1)), Fraction(0))
    return abs(mass - preimage)


# -- distribution diagnostics ------------------------------------------------


def ks_uniform(points: Sequence) -> Fraction:
    """Two-sided Kolmogorov-Smirnov distance between the empirical law of
    ``points`` (in [0, 1]) and the uniform distribution, exactly."""
    xs = sorted(as_rational(x) for x in points)
    n = len(xs)
    if not n:
        raise ValidationError("no points")
    best = Fraction(0)
    for i, x in enumerate(xs, 1):
        best = max(best, Fraction(i, n) - x, x - Fraction(i - 1, n))
    return best


def ks_critical_value(samples: int, level: float = 0.001) -> float:
    """Rejection threshold of the one-sample two-sided KS test."""
    return float(stats.kstwo.isf(level, samples))


@dataclass(frozen=True)
class SingularityReport:
    config: dict
    eta_freq: Fraction
    lebesgue_freq: Fraction | None
    lebesgue_excluded: int
    divergence_partial: Fraction
    divergent: bool | None
    ks_statistic: Fraction
    ks_resolution: Fraction
    ks_critical: float
    samples: list[EtaSample] = field(repr=False)

    @property
    def ks_rejects_uniform(self) -> bool:
        return self.ks_statistic - self.ks_resolution > self.ks_critical

    def summary(self) -> dict:
        ks_float = float(self.ks_statistic)
        return {
            "config": dict(self.config),
            "eta_freq": format_rational(self.eta_freq),
            "lebesgue_freq": None if self.lebesgue_freq is None else format_rational(self.lebesgue_freq),
            "lebesgue_excluded": self.lebesgue_excluded,
            "divergence_partial": format_rational(self.divergence_partial),
            "divergence_condition": self.divergent,
            "ks_statistic": ks_float,
            "ks_resolution": float(self.ks_resolution) + 2 * math.ulp(ks_float),
            "ks_critical_0.001": self.ks_critical,
            "ks_rejects_uniform": self.ks_rejects_uniform,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)


def samples_csv_rows(samples: Sequence[EtaSample]) -> list[list]:
    return [
        [s.index, format_rational(s.cylinder.left), format_rational(s.cylinder.right),
         format_digits(s.digits)]
        for s in samples
    ]


def singularity_experiment(
    matrix: StochasticMatrix,
    digit: int,
    samples: int,
    depth: int,
    seed: int,
    bits: int = 1024,
    workers: int = 1,
) -> SingularityReport:
    """Contrast how often ``digit`` occurs under eta and under Lebesgue measure.

    ``divergent`` records whether ``sum_k p_{digit,k}`` diverges: True/False
    for stationary matrices, None (no verdict) for row functions.
    """
    digit = check_positive_int(digit, "digit")
    samples = check_positive_int(samples, "samples")
    depth = check_positive_int(depth, "depth")
    seed = check_seed(seed)

    drawn = sample_eta_batch(matrix, depth, samples, seed, workers)
    eta_freq = Fraction(sum(s.digits.digits.count(digit) for s in drawn), samples * depth)

    lebesgue = frequency_experiment(UniformSampler(bits, seed), samples, depth, digit, workers)

    divergence = sum((matrix.row(k).prob(digit) for k in range(1, depth + 1)), Fraction(0))
    divergent = matrix.rows[-1].prob(digit) > 0 if matrix.stationary else None

    midpoints = [s.cylinder.midpoint for s in drawn]
    resolution = max(s.cylinder.length for s in drawn) / 2

    config = {
        "seed": seed,
        "digit": digit,
        "samples": samples,
        "depth": depth,
        "bits": bits,
        "matrix": matrix.describe(),
    }
    return SingularityReport(
        config=config,
        eta_freq=eta_freq,
        lebesgue_freq=lebesgue.mean_frequency,
        lebesgue_excluded=lebesgue.excluded,
        divergence_partial=divergence,
        divergent=divergent,
        ks_statistic=ks_uniform(midpoints),
        ks_resolution=resolution,
        ks_critical=ks_critical_value(samples),
        samples=drawn,
    )
