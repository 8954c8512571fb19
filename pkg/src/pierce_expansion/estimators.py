"""scikit-learn compatible wrappers.

Inputs are one-dimensional collections of numbers in (0, 1): Fractions,
ints-over-ints as strings (``"2/5"``), or floats, which are taken at their
exact binary value. A single-column 2-D array is accepted as well. Digits
can exceed 64 bits, so digit matrices use ``dtype=object``.
"""
from __future__ import annotations

from collections import Counter
from fractions import Fraction

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import as_rational, check_positive_int, check_unit_open
from .exceptions import ValidationError
from .expansion import evaluate, pierce_q_digits
from .random_eta import (
    DigitDistribution,
    StochasticMatrix,
    discreteness_criterion,
    sample_eta_batch,
)

__all__ = [
    "check_rationals",
    "check_digit_matrix",
    "PierceDigitEncoder",
    "DigitCountTransformer",
    "IIDDigitLawEstimator",
]


def check_rationals(X) -> list[Fraction]:
    """Validate ``X`` and return its entries as exact rationals in (0, 1)."""
    if isinstance(X, (str, bytes)):
        raise ValidationError("expected a collection of numbers, got a string")
    arr = np.asarray(X, dtype=object)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ValidationError(f"expected a single column, got shape {arr.shape}")
        arr = arr[:, 0]
    elif arr.ndim != 1:
        raise ValidationError(f"expected 1-D input, got shape {arr.shape}")
    if arr.size == 0:
        raise ValidationError("empty input")
    return [check_unit_open(as_rational(v)) for v in arr]


def check_digit_matrix(D) -> np.ndarray:
    """Validate a 2-D matrix of digits; 0 marks padding after termination."""
    arr = np.asarray(D, dtype=object)
    if arr.ndim != 2 or arr.size == 0:
        raise ValidationError("expected a non-empty 2-D digit matrix")
    for row in arr:
        seen_pad = False
        for d in row:
            d = int(d)
            if d < 0 or (seen_pad and d != 0):
                raise ValidationError("digits must be >= 1 followed only by 0 padding")
            seen_pad = seen_pad or d == 0
    return arr


def _g_digits(x: Fraction, depth: int) -> list[int]:
    q = pierce_q_digits(x.numerator, x.denominator, depth)
    return [b - a for a, b in zip([0] + q, q)]


class PierceDigitEncoder(TransformerMixin, BaseEstimator):
    """Map numbers to their first ``depth`` expansion digits.

    Expansions of rationals that end early are padded with ``pad_value``;
    with ``strict=True`` a short expansion raises instead.
    """

    def __init__(self, depth=10, pad_value=0, strict=False):
        self.depth = depth
        self.pad_value = pad_value
        self.strict = strict

    def fit(self, X, y=None):
        check_positive_int(self.depth, "depth")
        check_rationals(X)
        self.n_features_in_ = 1
        self.n_digits_ = self.depth
        return self

    def transform(self, X):
        check_is_fitted(self, "n_digits_")
        values = check_rationals(X)
        out = np.full((len(values), self.n_digits_), self.pad_value, dtype=object)
        for row, x in enumerate(values):
            g = _g_digits(x, self.n_digits_)
            if self.strict and len(g) < self.n_digits_:
                raise ValidationError(
                    f"expansion of {x} has {len(g)} digits, {self.n_digits_} requested"
                )
            out[row, : len(g)] = g
        return out

    def inverse_transform(self, D):
        """Exact partial sums of the digit rows (padding ignored)."""
        arr = check_digit_matrix(D)
        values = []
        for row in arr:
            digits = [int(d) for d in row if int(d) != 0]
            values.append(evaluate(digits) if digits else Fraction(0))
        return np.asarray(values, dtype=object)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "n_digits_")
        return np.asarray([f"g{k}" for k in range(1, self.n_digits_ + 1)], dtype=object)


class DigitCountTransformer(TransformerMixin, BaseEstimator):
    """Counts ``N_i(x, depth)`` of each digit in ``digits`` among the first
    ``depth`` digits of ``x``.

    ``digits=None`` learns the digit vocabulary from the data in ``fit``.
    """

    def __init__(self, depth=100, digits=None):
        self.depth = depth
        self.digits = digits

    def fit(self, X, y=None):
        depth = check_positive_int(self.depth, "depth")
        values = check_rationals(X)
        if self.digits is None:
            seen = set()
            for x in values:
                seen.update(_g_digits(x, depth))
            self.digits_ = tuple(sorted(seen))
        else:
            self.digits_ = tuple(check_positive_int(d, "digit") for d in self.digits)
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "digits_")
        values = check_rationals(X)
        out = np.zeros((len(values), len(self.digits_)), dtype=np.int64)
        for row, x in enumerate(values):
            counts = Counter(_g_digits(x, self.depth))
            out[row] = [counts.get(d, 0) for d in self.digits_]
        return out

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "digits_")
        return np.asarray([f"N{d}" for d in self.digits_], dtype=object)


class IIDDigitLawEstimator(BaseEstimator):
    """Empirical iid digit law fitted to a digit matrix.

    ``fit`` takes digit rows (as produced by :class:`PierceDigitEncoder`)
    and stores the exact empirical frequencies as ``distribution_``. The
    fitted law can be sampled and classified.
    """

    def __init__(self, horizon=64):
        self.horizon = horizon

    def fit(self, D, y=None):
        arr = check_digit_matrix(D)
        counts = Counter(int(d) for d in arr.ravel() if int(d) != 0)
        total = sum(counts.values())
        if not total:
            raise ValidationError("no digits to fit")
        top = max(counts)
        head = tuple(Fraction(counts.get(m, 0), total) for m in range(1, top + 1))
        self.distribution_ = DigitDistribution(head)
        self.n_digits_seen_ = total
        return self

    def purity(self):
        check_is_fitted(self, "distribution_")
        matrix = StochasticMatrix.iid(self.distribution_)
        return discreteness_criterion(matrix, check_positive_int(self.horizon, "horizon"))

    def sample(self, n_samples, depth, random_state=0):
        check_is_fitted(self, "distribution_")
        matrix = StochasticMatrix.iid(self.distribution_)
        drawn = sample_eta_batch(matrix, depth, n_samples, random_state)
        return np.asarray([list(s.digits.digits) for s in drawn], dtype=object)
